#include "foldgan/io/dataset_csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "foldgan/io/format.hpp"

namespace foldgan::io {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no); }

template <typename Int>
Int parse_int(std::string_view s, const std::string& what) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DataError(what + ": '" + std::string(s) + "' is not an integer");
  return v;
}

double parse_value(std::string_view s, const std::string& what) {
  try {
    return parse_double(s, what);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

void check_id(const std::string& id) {
  if (id.find_first_of(",\n\r") != std::string::npos) throw DataError("id '" + id + "' contains a comma or newline");
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void write_dataset(std::ostream& out, const LabelledDataset& ds) {
  ds.validate();
  const bool normalized =
      !ds.items.empty() && std::all_of(ds.items.begin(), ds.items.end(), [](const Heatmap& h) { return h.normalized; });
  const std::size_t cells = ds.items.empty() ? 0 : ds.items.front().P * ds.items.front().D;
  out << "# normalized=" << (normalized ? 1 : 0) << '\n';
  out << "id,label,P,D";
  for (std::size_t i = 0; i < cells; ++i) out << ",v_" << i;
  out << '\n';
  for (const Heatmap& h : ds.items) {
    check_id(h.id);
    out << h.id << ',' << h.label << ',' << h.P << ',' << h.D;
    for (std::size_t c = 0; c < h.D; ++c)
      for (std::size_t r = 0; r < h.P; ++r) out << ',' << format_double(h.at(r, c));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed");
}

void save_dataset(const std::string& path, const LabelledDataset& ds) {
  std::ofstream out = open_out(path);
  write_dataset(out, ds);
}

LabelledDataset read_dataset(std::istream& in) {
  LabelledDataset ds;
  bool normalized = false, have_header = false;
  std::size_t header_cells = 0;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    strip_cr(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = std::string_view(line).substr(1);
      const auto pos = body.find("normalized=");
      if (pos != std::string_view::npos) normalized = body.substr(pos + 11) == "1";
      continue;
    }
    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() < 4 || fields[0] != "id" || fields[1] != "label" || fields[2] != "P" || fields[3] != "D")
        throw DataError(where(line_no) + ": expected header id,label,P,D,v_0,...");
      header_cells = fields.size() - 4;
      for (std::size_t i = 0; i < header_cells; ++i)
        if (fields[4 + i] != "v_" + std::to_string(i)) throw DataError(where(line_no) + ": bad value column name");
      have_header = true;
      continue;
    }
    const std::string ctx = where(line_no);
    if (fields.size() < 4) throw DataError(ctx + ": too few fields");
    const auto P = parse_int<std::size_t>(fields[2], ctx + " P");
    const auto D = parse_int<std::size_t>(fields[3], ctx + " D");
    if (P * D != header_cells || fields.size() != 4 + P * D)
      throw DataError(ctx + ": " + std::to_string(fields.size() - 4) + " values for a " + std::to_string(P) + "x" +
                      std::to_string(D) + " heatmap (header has " + std::to_string(header_cells) + ")");
    Heatmap h(P, D, parse_int<int>(fields[1], ctx + " label"));
    h.id = std::string(fields[0]);
    h.normalized = normalized;
    for (std::size_t c = 0; c < D; ++c)
      for (std::size_t r = 0; r < P; ++r)
        h.at(r, c) = parse_value(fields[4 + c * P + r], ctx + " v_" + std::to_string(c * P + r));
    try {
      h.validate();
    } catch (const DataError& e) {
      throw DataError(ctx + ": " + e.what());
    }
    ds.labels.push_back(h.label);
    ds.items.push_back(std::move(h));
  }
  if (!have_header) throw DataError("dataset has no header");
  ds.validate();
  return ds;
}

LabelledDataset load_dataset(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    return read_dataset(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<LoadSeries> read_series(std::istream& in) {
  std::vector<LoadSeries> out;
  bool have_header = false;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() < 3 || fields[0] != "id" || fields[1] != "label" || fields[2] != "sample_minutes")
        throw DataError(where(line_no) + ": expected header id,label,sample_minutes,values...");
      have_header = true;
      continue;
    }
    const std::string ctx = where(line_no);
    if (fields.size() < 4) throw DataError(ctx + ": a series needs at least one reading");
    LoadSeries s;
    s.id = std::string(fields[0]);
    s.label = parse_int<int>(fields[1], ctx + " label");
    s.sample_minutes = parse_int<int>(fields[2], ctx + " sample_minutes");
    for (std::size_t i = 3; i < fields.size(); ++i) s.values.push_back(parse_value(fields[i], ctx + " reading"));
    try {
      s.validate();
    } catch (const DataError& e) {
      throw DataError(ctx + ": " + e.what());
    }
    out.push_back(std::move(s));
  }
  if (!have_header) throw DataError("series file has no header");
  return out;
}

std::vector<LoadSeries> load_series(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    return read_series(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_series(std::ostream& out, const std::vector<LoadSeries>& series) {
  out << "id,label,sample_minutes,values\n";
  for (const LoadSeries& s : series) {
    s.validate();
    check_id(s.id);
    out << s.id << ',' << s.label << ',' << s.sample_minutes;
    for (const double v : s.values) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace foldgan::io
