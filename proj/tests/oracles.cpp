#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rpsvm/rng.hpp"

namespace oracles {

using rpsvm::DenseMatrix;
using rpsvm::SparseMatrix;

DenseMatrix naive_hadamard(size_t d) {
    if (d == 0 || (d & (d - 1)) != 0) throw std::invalid_argument("naive_hadamard: d not a power of two");
    DenseMatrix h(1, 1);
    h.at(0, 0) = 1.0;
    for (size_t m = 1; m < d; m <<= 1) {
        DenseMatrix next(2 * m, 2 * m);
        for (size_t i = 0; i < m; ++i) {
            for (size_t j = 0; j < m; ++j) {
                double v = h.at(i, j);
                next.at(i, j) = v;
                next.at(i, j + m) = v;
                next.at(i + m, j) = v;
                next.at(i + m, j + m) = -v;
            }
        }
        h = std::move(next);
    }
    double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (double& v : h.data) v *= scale;
    return h;
}

namespace {

std::vector<double> project_box_hyperplane(const std::vector<double>& v,
                                           const std::vector<double>& z, double c) {
    double hi = 0.0;
    for (double x : v) hi = std::max(hi, std::abs(x));
    hi += c + 1.0;
    double lo = -hi;
    auto balance = [&](double nu) {
        double s = 0.0;
        for (size_t i = 0; i < v.size(); ++i) {
            s += z[i] * std::clamp(v[i] - nu * z[i], 0.0, c);
        }
        return s;
    };
    for (int it = 0; it < 128; ++it) {
        double mid = 0.5 * (lo + hi);
        if (balance(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double nu = 0.5 * (lo + hi);
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i] - nu * z[i], 0.0, c);
    return out;
}

double kkt_measure(const DenseMatrix& q, const std::vector<double>& p,
                   const std::vector<double>& z, const std::vector<double>& beta, double c) {
    size_t n = p.size();
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < n; ++k) {
        double grad = p[k];
        for (size_t j = 0; j < n; ++j) grad += q.at(k, j) * beta[j];
        double v = -z[k] * grad;
        bool in_up = (z[k] > 0.0) ? (beta[k] < c - 1e-12 * c) : (beta[k] > 1e-12 * c);
        bool in_low = (z[k] > 0.0) ? (beta[k] > 1e-12 * c) : (beta[k] < c - 1e-12 * c);
        if (in_up) gmax = std::max(gmax, v);
        if (in_low) gmin = std::min(gmin, v);
    }
    if (!std::isfinite(gmax) || !std::isfinite(gmin)) return 0.0;
    return gmax - gmin;
}

}  // namespace

QpResult qp_box_hyperplane(const DenseMatrix& q, const std::vector<double>& p,
                           const std::vector<double>& z, double c, double tol, uint64_t max_iter) {
    size_t n = p.size();
    double lips = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (size_t j = 0; j < n; ++j) row += std::abs(q.at(i, j));
        lips = std::max(lips, row);
    }
    double step = 1.0 / std::max(lips, 1e-12);

    auto objective = [&](const std::vector<double>& b) {
        double f = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double qb = 0.0;
            for (size_t j = 0; j < n; ++j) qb += q.at(i, j) * b[j];
            f += b[i] * (0.5 * qb + p[i]);
        }
        return f;
    };

    QpResult res;
    std::vector<double> beta = project_box_hyperplane(std::vector<double>(n, 0.0), z, c);
    std::vector<double> yvec = beta;
    std::vector<double> grad(n), cand(n);
    double t = 1.0;
    double fbest = std::numeric_limits<double>::infinity();
    for (uint64_t it = 0; it < max_iter; ++it) {
        for (size_t i = 0; i < n; ++i) {
            double g = p[i];
            for (size_t j = 0; j < n; ++j) g += q.at(i, j) * yvec[j];
            grad[i] = g;
        }
        for (size_t i = 0; i < n; ++i) cand[i] = yvec[i] - step * grad[i];
        std::vector<double> next = project_box_hyperplane(cand, z, c);
        double f = objective(next);
        double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if (f > fbest) {
            yvec = next;  // restart momentum
            t = 1.0;
        } else {
            for (size_t i = 0; i < n; ++i) yvec[i] = next[i] + (t - 1.0) / tn * (next[i] - beta[i]);
            t = tn;
        }
        fbest = std::min(fbest, f);
        beta = std::move(next);
        if (it % 64 == 0) {
            double kkt = kkt_measure(q, p, z, beta, c);
            if (kkt < tol) {
                res.beta = beta;
                res.kkt = kkt;
                res.iterations = it;
                res.converged = true;
                return res;
            }
        }
    }
    res.beta = beta;
    res.kkt = kkt_measure(q, p, z, beta, c);
    res.iterations = max_iter;
    res.converged = res.kkt < tol;
    return res;
}

double meb_radius_grid_2d(const DenseMatrix& points, int levels, int grid) {
    if (points.cols != 2) throw std::invalid_argument("meb_radius_grid_2d: need 2D points");
    double xlo = points.at(0, 0), xhi = xlo, ylo = points.at(0, 1), yhi = ylo;
    for (size_t i = 0; i < points.rows; ++i) {
        xlo = std::min(xlo, points.at(i, 0));
        xhi = std::max(xhi, points.at(i, 0));
        ylo = std::min(ylo, points.at(i, 1));
        yhi = std::max(yhi, points.at(i, 1));
    }
    auto radius_at = [&](double cx, double cy) {
        double worst = 0.0;
        for (size_t i = 0; i < points.rows; ++i) {
            double dx = points.at(i, 0) - cx;
            double dy = points.at(i, 1) - cy;
            worst = std::max(worst, dx * dx + dy * dy);
        }
        return std::sqrt(worst);
    };
    double cx = 0.5 * (xlo + xhi), cy = 0.5 * (ylo + yhi);
    double span_x = std::max(xhi - xlo, 1e-12), span_y = std::max(yhi - ylo, 1e-12);
    double best = radius_at(cx, cy);
    double bx = cx, by = cy;
    for (int level = 0; level < levels; ++level) {
        for (int ix = 0; ix <= grid; ++ix) {
            for (int iy = 0; iy <= grid; ++iy) {
                double px = cx - span_x / 2 + span_x * ix / grid;
                double py = cy - span_y / 2 + span_y * iy / grid;
                double r = radius_at(px, py);
                if (r < best) {
                    best = r;
                    bx = px;
                    by = py;
                }
            }
        }
        cx = bx;
        cy = by;
        span_x = 4.0 * span_x / grid;
        span_y = 4.0 * span_y / grid;
    }
    return best;
}

double meb_radius_qp(const DenseMatrix& points, uint64_t iters) {
    size_t n = points.rows;
    size_t d = points.cols;
    std::vector<double> g(n * n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (size_t k = 0; k < d; ++k) acc += points.at(i, k) * points.at(j, k);
            g[i * n + j] = acc;
        }
    }
    auto project_simplex = [](std::vector<double>& v) {
        std::vector<double> u = v;
        std::sort(u.begin(), u.end(), std::greater<double>());
        double css = 0.0, theta = 0.0;
        size_t rho = 0;
        for (size_t i = 0; i < u.size(); ++i) {
            css += u[i];
            double t = (css - 1.0) / static_cast<double>(i + 1);
            if (u[i] - t > 0.0) {
                rho = i + 1;
                theta = t;
            }
        }
        (void)rho;
        for (double& x : v) x = std::max(0.0, x - theta);
    };
    double lips = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (size_t j = 0; j < n; ++j) row += std::abs(g[i * n + j]);
        lips = std::max(lips, 2.0 * row);
    }
    double step = 1.0 / std::max(lips, 1e-12);
    std::vector<double> lam(n, 1.0 / static_cast<double>(n));
    for (uint64_t it = 0; it < iters; ++it) {
        std::vector<double> grad(n);
        for (size_t i = 0; i < n; ++i) {
            double gl = 0.0;
            for (size_t j = 0; j < n; ++j) gl += g[i * n + j] * lam[j];
            grad[i] = g[i * n + i] - 2.0 * gl;  // ascent direction
        }
        for (size_t i = 0; i < n; ++i) lam[i] += step * grad[i];
        project_simplex(lam);
    }
    double val = 0.0;
    std::vector<double> glam(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) glam[i] += g[i * n + j] * lam[j];
    }
    double quad = 0.0;
    for (size_t i = 0; i < n; ++i) {
        val += lam[i] * g[i * n + i];
        quad += lam[i] * glam[i];
    }
    return std::sqrt(std::max(0.0, val - quad));
}

DenseMatrix random_orthonormal(size_t d, size_t rho, uint64_t seed) {
    rpsvm::rng::Stream s(seed, 777);
    DenseMatrix v(d, rho);
    for (size_t i = 0; i < d; ++i) {
        for (size_t j = 0; j < rho; ++j) v.at(i, j) = s.normal(i * rho + j);
    }
    for (int pass = 0; pass < 2; ++pass) {
        for (size_t j = 0; j < rho; ++j) {
            for (size_t k = 0; k < j; ++k) {
                double dot = 0.0;
                for (size_t i = 0; i < d; ++i) dot += v.at(i, j) * v.at(i, k);
                for (size_t i = 0; i < d; ++i) v.at(i, j) -= dot * v.at(i, k);
            }
            double nrm = 0.0;
            for (size_t i = 0; i < d; ++i) nrm += v.at(i, j) * v.at(i, j);
            nrm = std::sqrt(nrm);
            for (size_t i = 0; i < d; ++i) v.at(i, j) /= nrm;
        }
    }
    return v;
}

DenseMatrix random_dense(size_t n, size_t d, uint64_t seed, double scale) {
    rpsvm::rng::Stream s(seed, 778);
    DenseMatrix m(n, d);
    for (size_t i = 0; i < n * d; ++i) m.data[i] = scale * s.normal(i);
    return m;
}

SparseMatrix random_sparse(size_t n, size_t d, double density, uint64_t seed) {
    rpsvm::rng::Stream s(seed, 779);
    SparseMatrix m(n, d);
    uint64_t ctr = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < d; ++j) {
            if (s.unit(ctr) < density) {
                double v = s.normal(n * d + ctr);
                if (v == 0.0) v = 1.0;
                m.col_idx.push_back(static_cast<uint32_t>(j));
                m.values.push_back(v);
            }
            ++ctr;
        }
        m.row_ptr[i + 1] = m.values.size();
    }
    return m;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("max_abs_diff: shape");
    double worst = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

}  // namespace oracles
