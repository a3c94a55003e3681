#include "foldgan/io/report.hpp"

#include <charconv>
#include <sstream>
#include <string_view>
#include <vector>

#include "foldgan/io/format.hpp"

namespace foldgan::io {

namespace {

constexpr const char* kTrialHeader =
    "trial,seed,status,tn,fp,fn,tp,class0_precision,class0_recall,class0_f1,class1_precision,class1_recall,class1_f1,"
    "macro_precision,macro_recall,macro_f1,error";
constexpr std::size_t kTrialFields = 17;

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

std::string metrics_fields(const tstr::ClassMetrics& m) {
  return format_double(m.precision) + ',' + format_double(m.recall) + ',' + format_double(m.f1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename U>
U parse_uint(const std::string& s, const std::string& what) {
  U v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DataError(what + ": '" + s + "' is not an integer");
  return v;
}

double parse_metric(const std::string& s, const std::string& what) {
  try {
    return parse_double(s, what);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

}  // namespace

std::string format_report(const tstr::EvalReport& report) {
  std::ostringstream out;
  out << "[trials]\n" << kTrialHeader << '\n';
  for (const auto& t : report.trials) {
    out << t.trial << ',' << t.seed << ',';
    if (t.failed) {
      out << "failed,,,,,,,,,,,,,," << sanitize(t.error) << '\n';
      continue;
    }
    const auto& c = t.confusion.counts;
    out << "ok," << c[0][0] << ',' << c[0][1] << ',' << c[1][0] << ',' << c[1][1] << ','
        << metrics_fields(t.per_class[0]) << ',' << metrics_fields(t.per_class[1]) << ',' << metrics_fields(t.macro)
        << ",\n";
  }
  out << "\n[summary]\n";
  out << "trials," << report.trials.size() << '\n';
  out << "failed," << report.failed << '\n';
  out << "metric,min,lower_hinge,median,upper_hinge,max\n";
  for (const auto& m : report.summary) {
    const auto& s = m.stats;
    out << m.metric << ',' << format_double(s.min) << ',' << format_double(s.lower_hinge) << ','
        << format_double(s.median) << ',' << format_double(s.upper_hinge) << ',' << format_double(s.max) << '\n';
  }
  out << "\n[top" << report.top.size() << "]\n";
  out << "rank,trial,f1,precision,recall\n";
  for (std::size_t i = 0; i < report.top.size(); ++i) {
    const auto& r = report.top[i];
    out << i + 1 << ',' << r.trial << ',' << format_double(r.macro.f1) << ',' << format_double(r.macro.precision)
        << ',' << format_double(r.macro.recall) << '\n';
  }
  return out.str();
}

tstr::EvalReport parse_report(const std::string& text, std::size_t k) {
  tstr::EvalReport report;
  std::istringstream in(text);
  std::string line;
  bool in_trials = false, saw_trials = false, saw_header = false;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '[') {
      in_trials = line == "[trials]";
      saw_trials = saw_trials || in_trials;
      continue;
    }
    if (!in_trials) continue;
    const std::string where = "report line " + std::to_string(line_no);
    if (!saw_header) {
      if (line != kTrialHeader) throw DataError(where + ": unexpected trial header");
      saw_header = true;
      continue;
    }
    auto f = split(line);
    if (f.size() < kTrialFields) f.resize(kTrialFields);
    if (f.size() != kTrialFields) throw DataError(where + ": expected " + std::to_string(kTrialFields) + " fields");
    tstr::TrialResult t;
    t.trial = parse_uint<std::size_t>(f[0], where + " trial");
    t.seed = parse_uint<std::uint64_t>(f[1], where + " seed");
    if (f[2] == "failed") {
      t.failed = true;
      t.error = f[16];
    } else if (f[2] == "ok") {
      for (std::size_t i = 0; i < 4; ++i)
        t.confusion.counts[i / 2][i % 2] = parse_uint<std::size_t>(f[3 + i], where + " count");
      tstr::ClassMetrics* slots[3] = {&t.per_class[0], &t.per_class[1], &t.macro};
      for (std::size_t s = 0; s < 3; ++s) {
        slots[s]->precision = parse_metric(f[7 + 3 * s], where);
        slots[s]->recall = parse_metric(f[8 + 3 * s], where);
        slots[s]->f1 = parse_metric(f[9 + 3 * s], where);
      }
    } else {
      throw DataError(where + ": status must be ok or failed");
    }
    report.trials.push_back(std::move(t));
  }
  if (!saw_trials || !saw_header) throw DataError("report has no [trials] section");
  tstr::aggregate(report, k);
  return report;
}

}  // namespace foldgan::io
