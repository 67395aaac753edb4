#include "radact/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radact/errors.hpp"

namespace radact::features {

namespace {

double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

// Householder reduction of a real symmetric matrix to tridiagonal form,
// followed by implicit-shift QL iterations (EISPACK tred2/tql2 lineage).
void tridiagonalize(RealMatrix& a, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);

    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t l = i - 1;
        double h = 0.0;
        double scale = 0.0;
        if (l > 0) {
            for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
            if (scale == 0.0) {
                e[i] = a(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                double f = a(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    a(j, i) = a(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
                    e[j] = g / h;
                    f += e[j] * a(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = a(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k)
                        a(j, k) -= f * e[k] + g * a(i, k);
                }
            }
        } else {
            e[i] = a(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += a(i, k) * a(k, j);
                for (std::size_t k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
            }
        }
        d[i] = a(i, i);
        a(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
            a(j, i) = 0.0;
            a(i, j) = 0.0;
        }
    }
}

void ql_implicit(RealMatrix& z, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (++iter == 60)
                    throw InternalError("symmetric QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = hypot2(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = hypot2(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && m > l + 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

void fix_sign(RealMatrix& vectors, std::size_t col) {
    double peak = 0.0;
    for (std::size_t r = 0; r < vectors.rows(); ++r)
        peak = std::max(peak, std::abs(vectors(r, col)));
    if (peak == 0.0) return;
    for (std::size_t r = 0; r < vectors.rows(); ++r) {
        const double v = vectors(r, col);
        if (std::abs(v) > 1e-9 * peak) {
            if (v < 0.0)
                for (std::size_t k = 0; k < vectors.rows(); ++k) vectors(k, col) = -vectors(k, col);
            return;
        }
    }
}

} // namespace

EigenResult symmetric_eigendecompose(const RealMatrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw ShapeError("symmetric_eigendecompose: matrix must be square");
    const std::size_t n = a.rows();

    EigenResult res;
    if (n == 1) {
        res.values = {a(0, 0)};
        res.vectors = RealMatrix(1, 1, 1.0);
        return res;
    }

    RealMatrix z = a;
    std::vector<double> d, e;
    tridiagonalize(z, d, e);
    ql_implicit(z, d, e);

    // Stable descending sort keeps original index order for ties.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return d[i] > d[j]; });

    res.values.resize(n);
    res.vectors = RealMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        res.values[j] = d[order[j]];
        for (std::size_t r = 0; r < n; ++r) res.vectors(r, j) = z(r, order[j]);
        fix_sign(res.vectors, j);
    }
    return res;
}

PcaBasis fit_2dpca(const std::vector<RealMatrix>& images, std::size_t d) {
    if (images.size() < 2)
        throw ShapeError("fit_2dpca: need at least 2 images");
    const std::size_t rows = images[0].rows();
    const std::size_t cols = images[0].cols();
    for (const auto& img : images)
        if (img.rows() != rows || img.cols() != cols)
            throw ShapeError("fit_2dpca: images have mismatched dimensions");
    if (d < 1 || d > cols)
        throw RankError("fit_2dpca: d must be in [1, image column count]");

    RealMatrix mean(rows, cols, 0.0);
    for (const auto& img : images)
        for (std::size_t i = 0; i < img.size(); ++i) mean.data()[i] += img.data()[i];
    const double inv = 1.0 / static_cast<double>(images.size());
    for (auto& v : mean) v *= inv;

    // Column covariance H = (1/I) sum (X - mean)^T (X - mean).
    RealMatrix h(cols, cols, 0.0);
    RealMatrix centered(rows, cols);
    for (const auto& img : images) {
        for (std::size_t i = 0; i < img.size(); ++i)
            centered.data()[i] = img.data()[i] - mean.data()[i];
        for (std::size_t r = 0; r < rows; ++r) {
            const double* row = centered.row(r);
            for (std::size_t a = 0; a < cols; ++a) {
                const double va = row[a];
                if (va == 0.0) continue;
                double* hrow = h.row(a);
                for (std::size_t b = 0; b < cols; ++b) hrow[b] += va * row[b];
            }
        }
    }
    for (auto& v : h) v *= inv;

    EigenResult eig = symmetric_eigendecompose(h);
    for (auto& v : eig.values)
        if (v < 0.0 && v > -1e-10) v = 0.0;

    PcaBasis basis;
    basis.mean_image = std::move(mean);
    basis.eigenvalues = std::move(eig.values);
    basis.eigenvectors = RealMatrix(cols, d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t r = 0; r < cols; ++r)
            basis.eigenvectors(r, j) = eig.vectors(r, j);
    return basis;
}

RealMatrix project(const RealMatrix& image, const PcaBasis& basis) {
    if (image.rows() != basis.image_rows() || image.cols() != basis.image_cols())
        throw ShapeError("project: image dimensions do not match the basis");
    RealMatrix centered(image.rows(), image.cols());
    for (std::size_t i = 0; i < image.size(); ++i)
        centered.data()[i] = image.data()[i] - basis.mean_image.data()[i];
    return matmul(centered, basis.eigenvectors);
}

std::vector<double> vectorize_colmajor(const RealMatrix& m) {
    std::vector<double> v;
    v.reserve(m.size());
    for (std::size_t c = 0; c < m.cols(); ++c)
        for (std::size_t r = 0; r < m.rows(); ++r) v.push_back(m(r, c));
    return v;
}

FusionStats FusionStats::fit(const std::vector<std::vector<double>>& md_parts,
                             const std::vector<std::vector<double>>& rm_parts) {
    auto fit_block = [](const std::vector<std::vector<double>>& parts,
                        std::vector<double>& mean, std::vector<double>& scale) {
        if (parts.empty()) return;
        const std::size_t dim = parts[0].size();
        mean.assign(dim, 0.0);
        scale.assign(dim, 1.0);
        for (const auto& p : parts) {
            if (p.size() != dim) throw ShapeError("fusion stats: ragged feature block");
            for (std::size_t i = 0; i < dim; ++i) mean[i] += p[i];
        }
        for (auto& v : mean) v /= static_cast<double>(parts.size());
        std::vector<double> var(dim, 0.0);
        for (const auto& p : parts)
            for (std::size_t i = 0; i < dim; ++i) {
                const double dlt = p[i] - mean[i];
                var[i] += dlt * dlt;
            }
        double vmax = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            var[i] = std::sqrt(var[i] / static_cast<double>(parts.size()));
            vmax = std::max(vmax, var[i]);
        }
        const double floor = std::max(1e-12, 1e-6 * vmax);
        for (std::size_t i = 0; i < dim; ++i) scale[i] = std::max(var[i], floor);
    };

    FusionStats s;
    fit_block(md_parts, s.md_mean, s.md_scale);
    fit_block(rm_parts, s.rm_mean, s.rm_scale);
    return s;
}

FeatureVector fuse(const RealMatrix& y_md, const RealMatrix& y_rm,
                   const FusionStats& stats) {
    FeatureVector out;
    out.md_part = vectorize_colmajor(y_md);
    out.rm_part = vectorize_colmajor(y_rm);

    if (!stats.identity()) {
        if (stats.md_mean.size() != out.md_part.size() ||
            stats.rm_mean.size() != out.rm_part.size())
            throw ShapeError("fuse: stats dimensions do not match the projections");
        for (std::size_t i = 0; i < out.md_part.size(); ++i)
            out.md_part[i] = (out.md_part[i] - stats.md_mean[i]) / stats.md_scale[i];
        for (std::size_t i = 0; i < out.rm_part.size(); ++i)
            out.rm_part[i] = (out.rm_part[i] - stats.rm_mean[i]) / stats.rm_scale[i];
    }

    out.fused.reserve(out.md_part.size() + out.rm_part.size());
    out.fused.insert(out.fused.end(), out.md_part.begin(), out.md_part.end());
    out.fused.insert(out.fused.end(), out.rm_part.begin(), out.rm_part.end());
    return out;
}

} // namespace radact::features
