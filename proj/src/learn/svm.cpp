#include <algorithm>
#include <cmath>
#include <vector>

#include "itsminer/learn/learn.hpp"
#include "itsminer/rng.hpp"

namespace itsminer::learn {

namespace {

constexpr double kEps = 1e-12;

// Soft-margin SMO (Platt's algorithm with an error cache). Works on a
// precomputed kernel matrix when it fits, otherwise evaluates kernels on
// demand against cached self-products.
class SmoSolver {
public:
    SmoSolver(const std::vector<SparseVector>& X, const std::vector<double>& y, double c,
              SvmKernel kernel, double gamma, double tol, std::uint64_t seed)
        : X_(X), y_(y), c_(c), kernel_(kernel), gamma_(gamma), tol_(tol), rng_(seed) {
        n_ = X.size();
        alpha_.assign(n_, 0.0);
        errors_.assign(n_, 0.0);
        self_dot_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) self_dot_[i] = detail::dot_sparse(X[i], X[i]);
        use_matrix_ = n_ <= 2048;
        if (use_matrix_) {
            kmat_.assign(n_ * n_, 0.0);
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = i; j < n_; ++j) {
                    double k = kernel_raw(i, j);
                    kmat_[i * n_ + j] = k;
                    kmat_[j * n_ + i] = k;
                }
        }
        for (std::size_t i = 0; i < n_; ++i) errors_[i] = -y_[i];  // f == 0 initially
    }

    void solve(int max_passes = 10000) {
        bool examine_all = true;
        int changed = 0;
        int passes = 0;
        while ((changed > 0 || examine_all) && passes < max_passes) {
            changed = 0;
            if (examine_all) {
                for (std::size_t i = 0; i < n_; ++i) changed += examine(i);
            } else {
                for (std::size_t i = 0; i < n_; ++i)
                    if (alpha_[i] > 0.0 && alpha_[i] < c_) changed += examine(i);
            }
            if (examine_all) examine_all = false;
            else if (changed == 0) examine_all = true;
            ++passes;
        }
    }

    const std::vector<double>& alphas() const { return alpha_; }
    double bias() const { return b_; }

    double decision(std::size_t i) const { return errors_[i] + y_[i]; }

private:
    double kernel_raw(std::size_t i, std::size_t j) const {
        double dot = detail::dot_sparse(X_[i], X_[j]);
        if (kernel_ == SvmKernel::Linear) return dot;
        return std::exp(-gamma_ * (self_dot_[i] + self_dot_[j] - 2.0 * dot));
    }

    double k(std::size_t i, std::size_t j) const {
        return use_matrix_ ? kmat_[i * n_ + j] : kernel_raw(i, j);
    }

    int examine(std::size_t i2) {
        double y2 = y_[i2];
        double alph2 = alpha_[i2];
        double e2 = errors_[i2];
        double r2 = e2 * y2;
        if (!((r2 < -tol_ && alph2 < c_) || (r2 > tol_ && alph2 > 0.0))) return 0;

        // heuristic 1: non-bound point with the largest |E1 - E2|
        std::ptrdiff_t best = -1;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] <= 0.0 || alpha_[i] >= c_) continue;
            double gap = std::fabs(errors_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = static_cast<std::ptrdiff_t>(i);
            }
        }
        if (best >= 0 && take_step(static_cast<std::size_t>(best), i2)) return 1;

        // heuristic 2: sweep the non-bound points from a random start
        std::size_t start = static_cast<std::size_t>(rng_.below(n_));
        for (std::size_t off = 0; off < n_; ++off) {
            std::size_t i1 = (start + off) % n_;
            if (alpha_[i1] <= 0.0 || alpha_[i1] >= c_) continue;
            if (take_step(i1, i2)) return 1;
        }
        // heuristic 3: sweep everything
        start = static_cast<std::size_t>(rng_.below(n_));
        for (std::size_t off = 0; off < n_; ++off) {
            std::size_t i1 = (start + off) % n_;
            if (take_step(i1, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        double alph1 = alpha_[i1], alph2 = alpha_[i2];
        double y1 = y_[i1], y2 = y_[i2];
        double e1 = errors_[i1], e2 = errors_[i2];
        double s = y1 * y2;

        double lo, hi;
        if (s < 0) {
            lo = std::max(0.0, alph2 - alph1);
            hi = std::min(c_, c_ + alph2 - alph1);
        } else {
            lo = std::max(0.0, alph1 + alph2 - c_);
            hi = std::min(c_, alph1 + alph2);
        }
        if (lo >= hi) return false;

        double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
        double eta = k11 + k22 - 2.0 * k12;

        double a2;
        if (eta > kEps) {
            a2 = alph2 + y2 * (e1 - e2) / eta;
            a2 = std::clamp(a2, lo, hi);
        } else {
            // evaluate the dual objective at both clip bounds
            double f1 = y1 * (e1 + b_) - alph1 * k11 - s * alph2 * k12;
            double f2 = y2 * (e2 + b_) - alph2 * k22 - s * alph1 * k12;
            double l1 = alph1 + s * (alph2 - lo);
            double h1 = alph1 + s * (alph2 - hi);
            double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                            s * lo * l1 * k12;
            double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                            s * hi * h1 * k12;
            if (obj_lo < obj_hi - kEps) a2 = lo;
            else if (obj_lo > obj_hi + kEps) a2 = hi;
            else return false;
        }
        if (std::fabs(a2 - alph2) < kEps * (a2 + alph2 + kEps)) return false;

        double a1 = alph1 + s * (alph2 - a2);
        if (a1 < 0.0) {
            a2 += s * a1;
            a1 = 0.0;
        } else if (a1 > c_) {
            a2 += s * (a1 - c_);
            a1 = c_;
        }

        double b1 = e1 + y1 * (a1 - alph1) * k11 + y2 * (a2 - alph2) * k12 + b_;
        double b2 = e2 + y1 * (a1 - alph1) * k12 + y2 * (a2 - alph2) * k22 + b_;
        double b_new;
        if (a1 > 0.0 && a1 < c_) b_new = b1;
        else if (a2 > 0.0 && a2 < c_) b_new = b2;
        else b_new = 0.5 * (b1 + b2);

        double d1 = y1 * (a1 - alph1);
        double d2 = y2 * (a2 - alph2);
        for (std::size_t i = 0; i < n_; ++i)
            errors_[i] += d1 * k(i1, i) + d2 * k(i2, i) - (b_new - b_);

        alpha_[i1] = a1;
        alpha_[i2] = a2;
        b_ = b_new;
        errors_[i1] = decision_raw(i1) - y_[i1];
        errors_[i2] = decision_raw(i2) - y_[i2];
        return true;
    }

    double decision_raw(std::size_t j) const {
        double f = -b_;
        for (std::size_t i = 0; i < n_; ++i)
            if (alpha_[i] > 0.0) f += alpha_[i] * y_[i] * k(i, j);
        return f;
    }

    const std::vector<SparseVector>& X_;
    const std::vector<double>& y_;
    double c_;
    SvmKernel kernel_;
    double gamma_;
    double tol_;
    Rng rng_;
    std::size_t n_ = 0;
    double b_ = 0.0;
    bool use_matrix_ = false;
    std::vector<double> alpha_;
    std::vector<double> errors_;
    std::vector<double> self_dot_;
    std::vector<double> kmat_;
};

// Platt's probabilistic output fit (Lin & Weng's robust Newton variant):
// finds (a, b) such that P(y=1|f) = 1/(1+exp(a*f+b)).
void fit_platt(const std::vector<double>& decision, const std::vector<int>& y01, double& a,
               double& b) {
    const std::size_t n = decision.size();
    double prior1 = 0.0;
    for (int y : y01) prior1 += y;
    double prior0 = static_cast<double>(n) - prior1;

    double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
    double lo_target = 1.0 / (prior0 + 2.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = y01[i] ? hi_target : lo_target;

    a = 0.0;
    b = std::log((prior0 + 1.0) / (prior1 + 1.0));

    auto objective = [&](double pa, double pb) {
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = pa * decision[i] + pb;
            // t*z + log(1+exp(-z)) in a stable form
            if (z >= 0) obj += t[i] * z + std::log1p(std::exp(-z));
            else obj += (t[i] - 1.0) * z + std::log1p(std::exp(z));
        }
        return obj;
    };

    double obj = objective(a, b);
    const double min_step = 1e-10, sigma = 1e-12;
    for (int iter = 0; iter < 100; ++iter) {
        double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = a * decision[i] + b;
            double p, q;
            if (z >= 0) {
                double e = std::exp(-z);
                p = e / (1.0 + e);
                q = 1.0 / (1.0 + e);
            } else {
                double e = std::exp(z);
                p = 1.0 / (1.0 + e);
                q = e / (1.0 + e);
            }
            double d2 = p * q;
            h11 += decision[i] * decision[i] * d2;
            h22 += d2;
            h21 += decision[i] * d2;
            double d1 = t[i] - p;
            g1 += decision[i] * d1;
            g2 += d1;
        }
        if (std::fabs(g1) < 1e-5 && std::fabs(g2) < 1e-5) break;

        double det = h11 * h22 - h21 * h21;
        double da = -(h22 * g1 - h21 * g2) / det;
        double db = -(-h21 * g1 + h11 * g2) / det;
        double gd = g1 * da + g2 * db;

        double step = 1.0;
        bool moved = false;
        while (step >= min_step) {
            double na = a + step * da, nb = b + step * db;
            double nobj = objective(na, nb);
            if (nobj < obj + 1e-4 * step * gd) {
                a = na;
                b = nb;
                obj = nobj;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
}

}  // namespace

namespace detail {

SvmModel fit_svm(const Problem& p, const HyperParams& params) {
    const std::size_t n = p.X.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = p.y01[i] ? 1.0 : -1.0;

    double gamma = params.svc_gamma;
    if (gamma <= 0.0 && params.svc_kernel == SvmKernel::Rbf) {
        // 1 / (dim * variance of all feature values, zeros included)
        double total = 0.0, total_sq = 0.0;
        double cells = static_cast<double>(n) * static_cast<double>(p.dim);
        for (const SparseVector& v : p.X)
            for (const auto& [_, w] : v.entries) {
                total += w;
                total_sq += w * w;
            }
        double mean = total / cells;
        double var = total_sq / cells - mean * mean;
        gamma = (var > 0.0) ? 1.0 / (static_cast<double>(p.dim) * var)
                            : 1.0 / static_cast<double>(p.dim);
    }

    SmoSolver solver(p.X, y, params.svc_c, params.svc_kernel, gamma, params.svc_tol, params.seed);
    solver.solve();

    SvmModel model;
    model.kernel = params.svc_kernel;
    model.gamma = gamma;
    model.bias = -solver.bias();  // solver uses f = sum - b, model stores f = sum + bias
    const std::vector<double>& alpha = solver.alphas();
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 0.0) {
            model.support_vectors.push_back(p.X[i]);
            model.dual_coef.push_back(alpha[i] * y[i]);
        }
    }

    // logistic link on the training decision values
    std::vector<double> decision(n);
    for (std::size_t i = 0; i < n; ++i) decision[i] = solver.decision(i);
    fit_platt(decision, p.y01, model.platt_a, model.platt_b);
    return model;
}

}  // namespace detail

double svm_kkt_violation(const TrainedModel& model, const std::vector<SparseVector>& X,
                         const std::vector<SuccessLabel>& y) {
    const auto& svm = model.as<SvmModel>();
    const double c = model.params.svc_c;

    // recover alpha per training point: match by decision-function margin
    double worst = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double yi = (y[i] == SuccessLabel::Successful) ? 1.0 : -1.0;
        double margin = yi * svm.decision_value(X[i]);
        // find this point's alpha by locating it among the support vectors
        double alpha = 0.0;
        for (std::size_t s = 0; s < svm.support_vectors.size(); ++s) {
            if (svm.support_vectors[s].entries == X[i].entries) {
                alpha = std::fabs(svm.dual_coef[s]);
                break;
            }
        }
        double violation = 0.0;
        if (alpha <= kEps) violation = std::max(0.0, 1.0 - margin);
        else if (alpha >= c - kEps) violation = std::max(0.0, margin - 1.0);
        else violation = std::fabs(margin - 1.0);
        worst = std::max(worst, violation);
    }
    return worst;
}

}  // namespace itsminer::learn
