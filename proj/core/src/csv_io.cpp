#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string_view>

#include "twinforge/dataset.hpp"
#include "twinforge/error.hpp"

namespace twinforge {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

bool parse_real(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

bool parse_int(std::string_view cell, int& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

struct Header {
  std::vector<std::size_t> feature_columns;
  std::optional<std::size_t> source_column;
  std::size_t label_column = 0;
  std::size_t arity = 0;
};

Header parse_header(std::string_view line, const std::string& name, DataFormat format) {
  const auto cells = split_cells(line);
  Header h;
  h.arity = cells.size();
  if (cells.empty() || cells.back() != "label") {
    throw ParseError(name, 1, "header must end with a `label` column");
  }
  h.label_column = cells.size() - 1;
  for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
    if (cells[c] == "source" && format == DataFormat::csv_features) {
      if (h.source_column) throw ParseError(name, 1, "duplicate `source` column");
      h.source_column = c;
      continue;
    }
    if (cells[c].empty()) throw ParseError(name, 1, "empty column name");
    if (format == DataFormat::embedding_csv) {
      const std::string expected = "d" + std::to_string(h.feature_columns.size());
      if (cells[c] != expected) {
        throw ParseError(name, 1, "expected column `" + expected + "`, found `" + std::string(cells[c]) + "`");
      }
    }
    h.feature_columns.push_back(c);
  }
  if (h.feature_columns.empty()) throw ParseError(name, 1, "header declares no feature columns");
  return h;
}

}  // namespace

Dataset parse_dataset(std::istream& in, const std::string& name, const LoadOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<Header> header;
  std::vector<double> values;
  std::vector<int> raw_labels;
  std::vector<std::size_t> label_lines;
  std::vector<std::string> sources;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!header) {
      if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      header = parse_header(line, name, options.format);
      continue;
    }
    const auto cells = split_cells(line);
    if (cells.size() != header->arity) {
      throw ParseError(name, line_no, "expected " + std::to_string(header->arity) + " cells, found " +
                                          std::to_string(cells.size()));
    }
    for (std::size_t c : header->feature_columns) {
      double v = 0.0;
      if (!parse_real(cells[c], v)) {
        throw ParseError(name, line_no, "non-numeric cell `" + std::string(cells[c]) + "`");
      }
      if (!std::isfinite(v)) {
        throw ParseError(name, line_no, "non-finite cell `" + std::string(cells[c]) + "`");
      }
      values.push_back(v);
    }
    int y = 0;
    if (!parse_int(cells[header->label_column], y)) {
      throw ParseError(name, line_no, "label `" + std::string(cells[header->label_column]) + "` is not an integer");
    }
    raw_labels.push_back(y);
    label_lines.push_back(line_no);
    if (header->source_column) sources.emplace_back(cells[*header->source_column]);
  }
  if (!header) throw ParseError(name, 1, "missing header row");
  if (raw_labels.empty()) throw SchemaError(name + ": no data rows");

  std::vector<int> labels(raw_labels.size());
  std::vector<int> declared;
  if (options.num_classes == 0) {
    bool saw_zero = false;
    bool saw_minus = false;
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      const int y = raw_labels[i];
      if (y != 0 && y != 1 && y != -1) {
        throw SchemaError(name + ":" + std::to_string(label_lines[i]) + ": label " + std::to_string(y) +
                          " is outside the binary class set");
      }
      saw_zero |= (y == 0);
      saw_minus |= (y == -1);
      labels[i] = (y == 1) ? kPositive : kNegative;
    }
    if (saw_zero && saw_minus) {
      throw SchemaError(name + ": binary labels mix the {0,1} and {-1,1} encodings");
    }
    declared = {kNegative, kPositive};
  } else {
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      const int y = raw_labels[i];
      if (y < 0 || y >= options.num_classes) {
        throw SchemaError(name + ":" + std::to_string(label_lines[i]) + ": label " + std::to_string(y) +
                          " is outside 0.." + std::to_string(options.num_classes - 1));
      }
      labels[i] = y;
    }
    for (int c = 0; c < options.num_classes; ++c) declared.push_back(c);
  }

  const auto rows = static_cast<Eigen::Index>(labels.size());
  const auto cols = static_cast<Eigen::Index>(header->feature_columns.size());
  RowMatrix x = Eigen::Map<const RowMatrix>(values.data(), rows, cols);
  try {
    return Dataset(std::move(x), std::move(labels), std::move(sources), std::move(declared));
  } catch (const SchemaError& e) {
    throw SchemaError(name + ": " + e.what());
  }
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_dataset(in, path.string(), options);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  for (std::size_t c = 0; c < data.dim(); ++c) buf << 'd' << c << ',';
  if (data.has_sources()) buf << "source,";
  buf << "label\n";
  char cell[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t c = 0; c < data.dim(); ++c) {
      const double v = data.features()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
      const auto [end, ec] = std::to_chars(cell, cell + sizeof(cell), v);
      buf.write(cell, end - cell);
      buf << ',';
    }
    if (data.has_sources()) buf << data.sources()[i] << ',';
    buf << data.label(i) << '\n';
  }
  out << buf.str();
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_dataset(out, data);
  if (!out) throw Error("write failed for " + path.string());
}

std::uint64_t content_hash(std::span<const char> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t content_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  return content_hash(std::span<const char>(bytes.data(), bytes.size()));
}

}  // namespace twinforge
