#include "pw/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "pw/errors.hpp"

namespace pw::io {

namespace {

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& tok, const std::string& path,
                    std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) parse_fail(path, line, "bad number '" + tok + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    parse_fail(path, line, "bad number '" + tok + "'");
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

DiscreteMeasure rows_to_measure(std::vector<std::vector<double>> rows,
                                bool weight_col, const std::string& path) {
  if (rows.empty()) throw EmptyCloud(path + ": no points");
  const std::size_t cols = rows.front().size();
  const std::size_t d = weight_col ? cols - 1 : cols;
  Eigen::MatrixXd pts(rows.size(), d);
  Eigen::VectorXd w(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < d; ++c) pts(i, c) = rows[i][c];
    w(i) = weight_col ? rows[i][d] : 1.0;
  }
  if (weight_col) {
    const double total = w.sum();
    if (!(total > 0.0))
      throw ParseError(path + ": weight column does not sum to a positive value");
    w /= total;
  } else {
    w.setConstant(1.0 / double(rows.size()));
  }
  try {
    return normalize(DiscreteMeasure(std::move(pts), std::move(w)));
  } catch (const DegenerateSupport&) {
    throw EmptyCloud(path + ": degenerate cloud (all points coincide)");
  }
}

DiscreteMeasure read_xyz(const std::string& path, const ReadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (width == 0) width = toks.size();
    if (toks.size() != width)
      parse_fail(path, lineno, "inconsistent column count");
    std::vector<double> row;
    row.reserve(toks.size());
    for (const auto& t : toks) row.push_back(parse_number(t, path, lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyCloud(path + ": no points");
  if (width < 1) parse_fail(path, 1, "no columns");
  bool weight_col = false;
  if (opts.weight_column == 1) {
    if (width < 2) parse_fail(path, 1, "weight column requires >= 2 columns");
    weight_col = true;
  } else if (opts.weight_column < 0) {
    weight_col = width == 4;  // 3-D plus trailing weight
  }
  return rows_to_measure(std::move(rows), weight_col, path);
}

DiscreteMeasure read_csv(const std::string& path, const ReadOptions&) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::string header;
  std::size_t lineno = 0;
  do {
    if (!std::getline(in, header)) throw EmptyCloud(path + ": empty file");
    ++lineno;
  } while (header.empty());
  const auto names = split_csv(header);
  const std::vector<std::string> allowed2 = {"x", "y"};
  bool weight_col = false;
  std::size_t d = 0;
  if (names.size() >= 2 && names[0] == "x" && names[1] == "y") {
    d = 2;
    std::size_t at = 2;
    if (at < names.size() && names[at] == "z") {
      d = 3;
      ++at;
    }
    if (at < names.size() && names[at] == "w") {
      weight_col = true;
      ++at;
    }
    if (at != names.size()) d = 0;
  }
  if (d == 0)
    parse_fail(path, lineno, "header must be x,y[,z][,w]");

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto toks = split_csv(line);
    if (toks.size() != d + (weight_col ? 1 : 0))
      parse_fail(path, lineno, "wrong field count");
    std::vector<double> row;
    for (const auto& t : toks) row.push_back(parse_number(t, path, lineno));
    rows.push_back(std::move(row));
  }
  return rows_to_measure(std::move(rows), weight_col, path);
}

DiscreteMeasure read_ply(const std::string& path, const ReadOptions&) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) parse_fail(path, lineno, "unexpected EOF");
    ++lineno;
    return split_ws(line);
  };
  auto toks = next();
  if (toks.size() != 1 || toks[0] != "ply")
    parse_fail(path, lineno, "missing ply magic");
  bool ascii = false;
  long vertex_count = -1;
  std::vector<std::string> props;
  bool in_vertex_element = false;
  while (true) {
    toks = next();
    if (toks.empty()) continue;
    if (toks[0] == "comment") continue;
    if (toks[0] == "format") {
      ascii = toks.size() >= 2 && toks[1] == "ascii";
      continue;
    }
    if (toks[0] == "element") {
      if (toks.size() == 3 && toks[1] == "vertex") {
        vertex_count = std::stol(toks[2]);
        in_vertex_element = true;
      } else {
        if (toks.size() == 3 && std::stol(toks[2]) > 0)
          parse_fail(path, lineno,
                     "only vertex elements are supported (points-only PLY)");
        in_vertex_element = false;
      }
      continue;
    }
    if (toks[0] == "property") {
      if (in_vertex_element && toks.size() >= 3) props.push_back(toks.back());
      continue;
    }
    if (toks[0] == "end_header") break;
  }
  if (!ascii) parse_fail(path, lineno, "only ascii PLY is supported");
  if (vertex_count < 1) throw EmptyCloud(path + ": no vertices");

  auto find_prop = [&](const std::string& name) {
    const auto it = std::find(props.begin(), props.end(), name);
    return it == props.end() ? -1
                             : static_cast<int>(it - props.begin());
  };
  const int ix = find_prop("x"), iy = find_prop("y"), iz = find_prop("z");
  if (ix < 0 || iy < 0) parse_fail(path, lineno, "vertex needs x and y");
  const std::size_t d = iz >= 0 ? 3 : 2;

  std::vector<std::vector<double>> rows;
  for (long v = 0; v < vertex_count; ++v) {
    toks = next();
    if (toks.size() < props.size())
      parse_fail(path, lineno, "short vertex line");
    std::vector<double> row(d);
    row[0] = parse_number(toks[ix], path, lineno);
    row[1] = parse_number(toks[iy], path, lineno);
    if (iz >= 0) row[2] = parse_number(toks[iz], path, lineno);
    rows.push_back(std::move(row));
  }
  return rows_to_measure(std::move(rows), false, path);
}

DiscreteMeasure read_pgm(const std::string& path, const ReadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open");

  auto next_token = [&]() {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {
        while ((c = in.get()) != EOF && c != '\n') {
        }
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) return tok;
        continue;
      }
      tok += static_cast<char>(c);
    }
    return tok;
  };

  const std::string magic = next_token();
  if (magic != "P2" && magic != "P5")
    throw ParseError(path + ": not a PGM (P2/P5) file");
  const long width = std::strtol(next_token().c_str(), nullptr, 10);
  const long height = std::strtol(next_token().c_str(), nullptr, 10);
  const long maxval = std::strtol(next_token().c_str(), nullptr, 10);
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535)
    throw ParseError(path + ": bad PGM dimensions");

  std::vector<long> pixels;
  pixels.reserve(width * height);
  if (magic == "P2") {
    for (long i = 0; i < width * height; ++i) {
      const std::string tok = next_token();
      if (tok.empty()) throw ParseError(path + ": truncated pixel data");
      pixels.push_back(std::strtol(tok.c_str(), nullptr, 10));
    }
  } else {
    // P5: one whitespace byte separates the header from the raster.
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(width * height * bytes);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      throw ParseError(path + ": truncated pixel data");
    for (long i = 0; i < width * height; ++i)
      pixels.push_back(bytes == 1
                           ? buf[i]
                           : (long(buf[2 * i]) << 8) | buf[2 * i + 1]);
  }

  std::vector<std::vector<double>> rows;
  for (long r = 0; r < height; ++r)
    for (long c = 0; c < width; ++c)
      if (pixels[r * width + c] >= opts.pgm_threshold)
        rows.push_back({c + 0.5, double(height) - r - 0.5});
  if (rows.empty()) throw EmptyCloud(path + ": no pixels at or above threshold");
  return rows_to_measure(std::move(rows), false, path);
}

}  // namespace

CloudFormat format_from_path(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "csv") return CloudFormat::Csv;
  if (ext == "ply") return CloudFormat::PlyAsciiPoints;
  if (ext == "pgm") return CloudFormat::PgmImage;
  return CloudFormat::XyzText;
}

DiscreteMeasure read_cloud(const std::string& path, CloudFormat format,
                           const ReadOptions& opts) {
  switch (format) {
    case CloudFormat::XyzText:
      return read_xyz(path, opts);
    case CloudFormat::Csv:
      return read_csv(path, opts);
    case CloudFormat::PlyAsciiPoints:
      return read_ply(path, opts);
    case CloudFormat::PgmImage:
      return read_pgm(path, opts);
  }
  throw Error("read_cloud: unknown format");
}

DiscreteMeasure read_cloud(const std::string& path, const ReadOptions& opts) {
  return read_cloud(path, format_from_path(path), opts);
}

void write_cloud(const std::string& path, const DiscreteMeasure& measure) {
  std::ofstream out(path);
  if (!out) throw Error("write_cloud: cannot open " + path);
  const bool csv = lower_ext(path) == "csv";
  const Eigen::Index n = measure.size();
  const Eigen::Index d = measure.dim();
  const double uniform = 1.0 / double(n);
  const bool with_weights =
      (measure.weights.array() - uniform).abs().maxCoeff() > 1e-15;

  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  if (csv) {
    out << (d == 3 ? "x,y,z" : "x,y") << (with_weights ? ",w" : "") << "\n";
  }
  const char sep = csv ? ',' : ' ';
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) {
      if (c) out << sep;
      put(measure.support(i, c));
    }
    if (with_weights) {
      out << sep;
      put(measure.weights(i));
    }
    out << "\n";
  }
  if (!out) throw Error("write_cloud: write failed for " + path);
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    std::vector<double> row;
    for (const auto& t : toks) row.push_back(parse_number(t, path, lineno));
    if (!rows.empty() && rows.front().size() != row.size())
      parse_fail(path, lineno, "ragged matrix");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": empty matrix");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j) m(i, j) = rows[i][j];
  return m;
}

std::string file_digest_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("digest: cannot open " + path);
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pw::io
