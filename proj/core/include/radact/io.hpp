#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radact/features.hpp"
#include "radact/matrix.hpp"
#include "radact/sigsim.hpp"

namespace radact::io {

/// Complex baseband container: magic "RDCB", three little-endian u32
/// (version, N, M), then N*M interleaved little-endian float32 (I,Q) pairs
/// in PRI-major (column-major) order.
void write_baseband(const sigsim::ComplexBaseband& bb, const std::string& path);
sigsim::ComplexBaseband read_baseband(const std::string& path,
                                      const sigsim::RadarConfig& cfg_template);

/// Real image container: 4-char magic, u32 rows, u32 cols, row-major
/// little-endian float32 values. "RDM1" holds range-map magnitudes,
/// "RMD1" micro-Doppler spectrograms; the same layout also serves for
/// sinogram dumps.
void write_real_matrix(const RealMatrix& m, const std::string& magic,
                       const std::string& path);
RealMatrix read_real_matrix(const std::string& expected_magic, const std::string& path);

void write_matrix_csv(const RealMatrix& m, const std::string& path);

/// PCA basis: magic "PCA2", u32 eta_r, eta_c, d, then the mean image
/// (row-major), all eta_c eigenvalues and the eta_c x d eigenvector matrix
/// (row-major), every value a little-endian float64.
void write_pca_basis(const features::PcaBasis& basis, const std::string& path);
features::PcaBasis read_pca_basis(const std::string& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const CsvTable& table, const std::string& path);
CsvTable read_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::uint64_t fnv1a_hash(const std::string& text);

} // namespace radact::io
