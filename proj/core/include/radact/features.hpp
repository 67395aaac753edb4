#pragma once

#include <cstdint>
#include <vector>

#include "radact/matrix.hpp"

namespace radact::features {

/// Eigendecomposition of a symmetric matrix via Householder
/// tridiagonalization and implicit-shift QL. Values sorted descending
/// (stable for ties), vectors stored as columns with the first
/// significantly nonzero component made positive.
struct EigenResult {
    std::vector<double> values;
    RealMatrix vectors; // n x n, column j pairs with values[j]
};

EigenResult symmetric_eigendecompose(const RealMatrix& a);

/// Image-space PCA basis: column-covariance eigenvectors of the training
/// images around their mean.
struct PcaBasis {
    RealMatrix mean_image;           // eta_r x eta_c
    RealMatrix eigenvectors;         // eta_c x d
    std::vector<double> eigenvalues; // all eta_c, descending, clamped >= 0

    std::size_t image_rows() const { return mean_image.rows(); }
    std::size_t image_cols() const { return mean_image.cols(); }
    std::size_t d() const { return eigenvectors.cols(); }
};

/// H = (1/I) sum (X - mean)^T (X - mean); basis keeps the top-d
/// eigenvectors by eigenvalue.
PcaBasis fit_2dpca(const std::vector<RealMatrix>& images, std::size_t d);

/// Y = (X - mean) Phi. Centering is deliberate: projected features become
/// invariant to the training-set mean.
RealMatrix project(const RealMatrix& image, const PcaBasis& basis);

/// Per-component normalization statistics of the two modality blocks,
/// estimated on training data. Default-constructed stats are the identity.
struct FusionStats {
    std::vector<double> md_mean, md_scale;
    std::vector<double> rm_mean, rm_scale;

    bool identity() const { return md_mean.empty() && rm_mean.empty(); }

    static FusionStats fit(const std::vector<std::vector<double>>& md_parts,
                           const std::vector<std::vector<double>>& rm_parts);
};

struct FeatureVector {
    std::vector<double> md_part; // vectorized, normalized Y_MD
    std::vector<double> rm_part; // vectorized, normalized Y_RM
    std::vector<double> fused;   // concatenation, micro-Doppler first
};

std::vector<double> vectorize_colmajor(const RealMatrix& m);

/// Column-major vectorization of both projections, per-modality
/// normalization with the given stats, then concatenation.
FeatureVector fuse(const RealMatrix& y_md, const RealMatrix& y_rm,
                   const FusionStats& stats = {});

} // namespace radact::features
