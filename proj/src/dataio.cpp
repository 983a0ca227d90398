#include "gaborboost/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gaborboost/errors.hpp"

namespace gaborboost {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(const std::string& text, double& value) {
  if (text.empty()) return false;
  const char* first = text.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Whitespace/comment-aware token reader for PGM headers.
class PgmHeaderReader {
 public:
  PgmHeaderReader(const std::string& bytes, const fs::path& path) : bytes_(bytes), path_(path) {}

  std::string token() {
    skip_space_and_comments();
    std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])) &&
           bytes_[pos_] != '#') {
      ++pos_;
    }
    if (start == pos_) throw ParseError(where(path_, line_) + "unexpected end of PGM data");
    return bytes_.substr(start, pos_ - start);
  }

  long integer(const char* what) {
    std::string t = token();
    long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || v < 0) {
      throw ParseError(where(path_, line_) + "invalid " + what + " '" + t + "'");
    }
    return v;
  }

  // Consumes the single whitespace byte separating the header from raster data.
  void end_header() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ParseError(where(path_, line_) + "malformed PGM header");
    }
    if (bytes_[pos_] == '\n') ++line_;
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  std::size_t line() const { return line_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

GrayImage load_pgm(const fs::path& path) {
  const std::string bytes = read_file(path);
  PgmHeaderReader reader(bytes, path);
  const std::string magic = reader.token();
  if (magic != "P2" && magic != "P5") {
    throw ParseError(where(path, 1) + "unsupported PGM magic '" + magic + "'");
  }
  const long width = reader.integer("width");
  const long height = reader.integer("height");
  const long maxval = reader.integer("maxval");
  if (width < 1 || height < 1) throw ParseError(where(path, reader.line()) + "empty image");
  if (maxval < 1 || maxval > 65535) {
    throw ParseError(where(path, reader.line()) + "maxval out of range: " + std::to_string(maxval));
  }

  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> data(n);
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      const long v = reader.integer("pixel value");
      if (v > maxval) {
        throw ParseError(where(path, reader.line()) + "pixel value exceeds maxval");
      }
      data[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
  } else {
    reader.end_header();
    const std::size_t bpp = maxval < 256 ? 1 : 2;
    if (bytes.size() - reader.pos() < n * bpp) {
      throw ParseError(where(path, reader.line()) + "truncated PGM raster");
    }
    const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + reader.pos());
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned v = bpp == 1 ? raw[i] : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
      if (v > static_cast<unsigned>(maxval)) {
        throw ParseError(where(path, reader.line()) + "pixel value exceeds maxval");
      }
      data[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  return GrayImage(static_cast<std::size_t>(width), static_cast<std::size_t>(height), std::move(data));
}

GrayImage load_csv_image(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::vector<double> data;
  std::size_t width = 0, height = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (height == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw ParseError(where(path, line_no) + "ragged row at line " + std::to_string(line_no));
    }
    for (const auto& cell : cells) {
      double v = 0.0;
      if (!parse_double(cell, v)) {
        throw ParseError(where(path, line_no) + "not a number: '" + cell + "'");
      }
      if (!std::isfinite(v)) throw ParseError(where(path, line_no) + "non-finite value");
      data.push_back(v);
    }
    ++height;
  }
  if (height == 0) throw ParseError(path.string() + ": empty CSV image");
  double peak = 0.0;
  for (double v : data) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : data) v /= peak;
  }
  return GrayImage(width, height, std::move(data));
}

}  // namespace

ImageFormat format_from_path(const fs::path& path) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".pgm") return ImageFormat::Pgm;
  if (ext == ".csv") return ImageFormat::Csv;
  throw ConfigError(path.string() + ": unsupported image extension '" + ext + "'");
}

GrayImage load_image(const fs::path& path, ImageFormat format) {
  return format == ImageFormat::Pgm ? load_pgm(path) : load_csv_image(path);
}

GrayImage load_image(const fs::path& path) { return load_image(path, format_from_path(path)); }

void write_pgm(const GrayImage& img, const fs::path& path, int maxval) {
  if (maxval != 255 && maxval != 65535) throw ParameterError("write_pgm: maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << "P5\n" << img.width() << " " << img.height() << "\n" << maxval << "\n";
  std::string raster;
  raster.reserve(img.size() * (maxval > 255 ? 2 : 1));
  for (double v : img.data()) {
    const auto q = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
    if (maxval > 255) raster.push_back(static_cast<char>(q >> 8));
    raster.push_back(static_cast<char>(q & 0xff));
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw Error(path.string() + ": write failed");
}

void LabeledDataset::validate(const std::set<std::string>& classes) const {
  if (images.size() != labels.size() || images.size() != names.size()) {
    throw ConfigError("dataset: images, labels and names differ in length");
  }
  if (classes.empty()) return;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!classes.contains(labels[i])) {
      throw ConfigError("dataset: record '" + names[i] + "' has undeclared label '" + labels[i] + "'");
    }
  }
}

LabeledDataset load_dataset(const fs::path& dir) {
  const fs::path labels_path = dir / "labels.csv";
  std::ifstream in(labels_path);
  if (!in) throw ParseError(labels_path.string() + ": cannot open file");

  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (line_no == 1) {
      if (cells.size() != 2 || cells[0] != "filename" || cells[1] != "label") {
        throw ParseError(where(labels_path, 1) + "expected header 'filename,label'");
      }
      continue;
    }
    if (cells.size() != 2 || cells[0].empty() || cells[1].empty()) {
      throw ParseError(where(labels_path, line_no) + "expected 'filename,label'");
    }
    entries.emplace_back(cells[0], cells[1]);
  }
  std::sort(entries.begin(), entries.end());

  LabeledDataset ds;
  ds.images.resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    ds.images[i] = load_image(dir / entries[i].first);
    ds.names.push_back(entries[i].first);
    ds.labels.push_back(entries[i].second);
  }
  return ds;
}

void save_dataset(const LabeledDataset& ds, const fs::path& dir) {
  ds.validate();
  fs::create_directories(dir);
  std::ofstream labels(dir / "labels.csv");
  if (!labels) throw Error((dir / "labels.csv").string() + ": cannot open for writing");
  labels << "filename,label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::string name = ds.names[i];
    if (lower(fs::path(name).extension().string()) != ".pgm") name += ".pgm";
    write_pgm(ds.images[i], dir / name);
    labels << name << "," << ds.labels[i] << "\n";
  }
}

LabeledDataset reduce_classes(const LabeledDataset& ds,
                              const std::map<std::string, std::string>& merge_map,
                              const std::set<std::string>& flip_set) {
  ds.validate();
  for (const auto& label : flip_set) {
    if (!merge_map.contains(label)) {
      throw ConfigError("reduce_classes: flip label '" + label + "' is not in the merge map");
    }
  }
  LabeledDataset out;
  out.names = ds.names;
  out.images.reserve(ds.size());
  out.labels.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto it = merge_map.find(ds.labels[i]);
    if (it == merge_map.end()) {
      throw ConfigError("reduce_classes: label '" + ds.labels[i] + "' of record '" + ds.names[i] +
                        "' has no mapping");
    }
    out.images.push_back(flip_set.contains(ds.labels[i]) ? flip_horizontal(ds.images[i]) : ds.images[i]);
    out.labels.push_back(it->second);
  }
  return out;
}

void write_feature_table(const std::vector<FeatureRow>& rows, const fs::path& path) {
  const bool with_pf = !rows.empty() && rows.front().pf.has_value();
  for (const auto& row : rows) {
    if (row.pf.has_value() != with_pf) {
      throw ConfigError("write_feature_table: rows disagree on PF columns");
    }
  }
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  const auto columns = feature_table_columns(with_pf);
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << "\n";
  for (const auto& row : rows) {
    out << row.id;
    for (std::size_t c = 1; c + 1 < columns.size(); ++c) out << "," << format_double(feature_value(row, columns[c]));
    out << "," << row.label << "\n";
  }
  if (!out) throw Error(path.string() + ": write failed");
}

std::vector<FeatureRow> read_feature_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(where(path, 1) + "missing header");
  const auto header = split_csv(line);
  const auto base = feature_table_columns(false);
  const auto full = feature_table_columns(true);
  for (const auto& name : header) {
    if (std::find(full.begin(), full.end(), name) == full.end()) {
      throw ParseError(where(path, 1) + "unknown column '" + name + "'");
    }
  }
  bool with_pf = false;
  if (header == full) {
    with_pf = true;
  } else if (header != base) {
    throw ParseError(where(path, 1) + "header does not match the feature-table column order");
  }

  std::vector<FeatureRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ParseError(where(path, line_no) + "expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(cells.size()));
    }
    std::vector<double> v(cells.size(), 0.0);
    for (std::size_t c = 1; c + 1 < cells.size(); ++c) {
      if (!parse_double(cells[c], v[c])) {
        throw ParseError(where(path, line_no) + "column '" + header[c] + "': not a number '" + cells[c] + "'");
      }
    }
    FeatureRow row;
    row.id = cells.front();
    row.label = cells.back();
    row.sigma_x = v[1];
    row.sigma_y = v[2];
    row.lambda = v[3];
    row.x_star = v[4];
    row.y_star = v[5];
    row.q_tl = v[6];
    row.q_tr = v[7];
    row.q_bl = v[8];
    row.q_br = v[9];
    row.egf_tl_bl = v[10];
    row.egf_tr_br = v[11];
    row.egf_tl_tr = v[12];
    row.egf_bl_br = v[13];
    if (with_pf) row.pf = PfParams{v[14], v[15], v[16], v[17], v[18]};
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gaborboost
