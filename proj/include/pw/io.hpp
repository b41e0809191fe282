#pragma once

#include <string>

#include "pw/measure.hpp"

namespace pw::io {

inline constexpr const char* kToolVersion = "0.1.0";

enum class CloudFormat { XyzText, Csv, PlyAsciiPoints, PgmImage };

struct ReadOptions {
  int pgm_threshold = 128;  // pixels at or above this gray level are lit
  // xyz column handling: -1 infers (4 columns -> 3-D + weight), 0 forces
  // all-coordinates, 1 forces a trailing weight column.
  int weight_column = -1;
};

/// Format from the file extension (.xyz/.txt, .csv, .ply, .pgm).
CloudFormat format_from_path(const std::string& path);

/// Parse a point cloud; every format returns a normalized measure.
DiscreteMeasure read_cloud(const std::string& path, CloudFormat format,
                           const ReadOptions& opts = {});
DiscreteMeasure read_cloud(const std::string& path,
                           const ReadOptions& opts = {});

/// Write as xyz text (or CSV by extension); 17 significant digits, weight
/// column only when the weights are not uniform.
void write_cloud(const std::string& path, const DiscreteMeasure& measure);

/// Whitespace matrix text used for --init provided:FILE couplings.
Eigen::MatrixXd read_matrix(const std::string& path);

/// FNV-1a 64-bit digest of the file bytes, as hex.
std::string file_digest_hex(const std::string& path);

}  // namespace pw::io
