#include "scoutnd/trace.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace scoutnd {

namespace {

bool feasible(const Vec& c) {
  for (double ci : c) {
    if (ci > kFeasibilityTol) return false;
  }
  return true;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

void EvalTrace::append(int level, double cost_increment, double f, const Vec& c) {
  TraceRecord rec;
  rec.eval_index = records_.size() + 1;
  rec.level = level;
  rec.hf_cost = (records_.empty() ? 0.0 : records_.back().hf_cost) + cost_increment;
  rec.f = f;
  rec.c = c;
  double prev = records_.empty() ? std::numeric_limits<double>::infinity()
                                 : records_.back().best_feasible;
  rec.best_feasible = feasible(c) ? std::min(prev, f) : prev;
  records_.push_back(std::move(rec));
}

void EvalTrace::recompute_best() {
  double best = std::numeric_limits<double>::infinity();
  for (TraceRecord& rec : records_) {
    if (feasible(rec.c)) best = std::min(best, rec.f);
    rec.best_feasible = best;
  }
}

void EvalTrace::write_csv(std::ostream& out) const {
  std::size_t n_constraints = records_.empty() ? 0 : records_.front().c.size();
  out << "eval_index,level,hf_cost,f";
  for (std::size_t i = 0; i < n_constraints; ++i) out << ",c" << i + 1;
  out << '\n';
  for (const TraceRecord& rec : records_) {
    out << rec.eval_index << ',' << rec.level << ',' << format_double(rec.hf_cost)
        << ',' << format_double(rec.f);
    for (double ci : rec.c) out << ',' << format_double(ci);
    out << '\n';
  }
}

std::string EvalTrace::to_csv() const {
  std::ostringstream out;
  write_csv(out);
  return out.str();
}

EvalTrace EvalTrace::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("trace: empty file");
  auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "eval_index" || header[1] != "level" ||
      header[2] != "hf_cost" || header[3] != "f") {
    throw IoError("trace: bad header, expected eval_index,level,hf_cost,f[,c1...]");
  }
  for (size_t i = 4; i < header.size(); ++i) {
    if (header[i] != "c" + std::to_string(i - 3)) {
      throw IoError("trace: bad constraint column name '" + header[i] + "'");
    }
  }
  std::size_t n_constraints = header.size() - 4;

  EvalTrace trace;
  std::uint64_t row = 1;
  std::uint64_t prev_index = 0;
  double prev_cost = 0.0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw IoError("trace: row " + std::to_string(row) + " has " +
                    std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(header.size()));
    }
    TraceRecord rec;
    bool ok = true;
    rec.eval_index = static_cast<std::uint64_t>(parse_double(fields[0], &ok));
    if (!ok) throw IoError("trace: row " + std::to_string(row) + ": bad eval_index");
    rec.level = static_cast<int>(parse_double(fields[1], &ok));
    if (!ok) throw IoError("trace: row " + std::to_string(row) + ": bad level");
    rec.hf_cost = parse_double(fields[2], &ok);
    if (!ok) throw IoError("trace: row " + std::to_string(row) + ": bad hf_cost");
    rec.f = parse_double(fields[3], &ok);
    if (!ok || std::isnan(rec.f)) {
      throw IoError("trace: row " + std::to_string(row) + ": bad f value");
    }
    rec.c.resize(n_constraints);
    for (size_t i = 0; i < n_constraints; ++i) {
      rec.c[i] = parse_double(fields[4 + i], &ok);
      if (!ok) throw IoError("trace: row " + std::to_string(row) + ": bad c value");
    }
    if (rec.eval_index <= prev_index) {
      throw IoError("trace: row " + std::to_string(row) +
                    ": eval_index not strictly increasing");
    }
    if (rec.hf_cost < prev_cost) {
      throw IoError("trace: row " + std::to_string(row) + ": hf_cost decreases");
    }
    prev_index = rec.eval_index;
    prev_cost = rec.hf_cost;
    trace.records_.push_back(std::move(rec));
  }
  if (trace.records_.empty()) throw IoError("trace: no records");
  trace.recompute_best();
  return trace;
}

}  // namespace scoutnd
