/*
* Copyright (C) 2026 The etsis authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#include "etsis/gp.hpp"
#include "etsis/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace etsis
{

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseRow = std::vector<std::pair<std::size_t, double>>;

// ---------------------------------------------------------------------------
// posynomial algebra

namespace
{

Monomial::Exponents normalized(Monomial::Exponents e)
{
    std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) {
        return a.first < b.first;
    });
    Monomial::Exponents out;
    for (const auto& [v, a] : e) {
        if (!out.empty() && out.back().first == v) {
            out.back().second += a;
        }
        else {
            out.emplace_back(v, a);
        }
    }
    std::erase_if(out, [](const auto& p) {
        return p.second == 0.0;
    });
    return out;
}

} // namespace

Monomial::Monomial(double coeff, Exponents exps)
    : m_coeff(coeff)
    , m_exps(normalized(std::move(exps)))
{
    if (!(coeff > 0) || !std::isfinite(coeff)) {
        throw InvalidArgument("monomial coefficient must be positive and finite");
    }
    for (const auto& e : m_exps) {
        if (!std::isfinite(e.second)) {
            throw InvalidArgument("monomial exponent must be finite");
        }
    }
}

Monomial Monomial::power(std::size_t var, double a, double coeff)
{
    return Monomial(coeff, {{var, a}});
}

Monomial Monomial::operator*(const Monomial& o) const
{
    Exponents e = m_exps;
    e.insert(e.end(), o.m_exps.begin(), o.m_exps.end());
    return Monomial(m_coeff * o.m_coeff, std::move(e));
}

Monomial Monomial::scaled(double c) const
{
    return Monomial(m_coeff * c, m_exps);
}

Monomial Monomial::pow(double a) const
{
    Exponents e = m_exps;
    for (auto& p : e) {
        p.second *= a;
    }
    return Monomial(std::pow(m_coeff, a), std::move(e));
}

double Monomial::eval(std::span<const double> y) const
{
    double v = m_coeff;
    for (const auto& [i, a] : m_exps) {
        v *= std::pow(y[i], a);
    }
    return v;
}

Posynomial::Posynomial(Monomial m)
{
    m_terms.push_back(std::move(m));
}

Posynomial& Posynomial::operator+=(const Monomial& m)
{
    m_terms.push_back(m);
    return *this;
}

Posynomial& Posynomial::operator+=(const Posynomial& p)
{
    m_terms.insert(m_terms.end(), p.m_terms.begin(), p.m_terms.end());
    return *this;
}

Posynomial Posynomial::operator+(const Posynomial& p) const
{
    Posynomial r = *this;
    r += p;
    return r;
}

Posynomial Posynomial::operator*(const Posynomial& p) const
{
    Posynomial r;
    r.m_terms.reserve(m_terms.size() * p.m_terms.size());
    for (const auto& a : m_terms) {
        for (const auto& b : p.m_terms) {
            r.m_terms.push_back(a * b);
        }
    }
    return r;
}

Posynomial Posynomial::scaled(double c) const
{
    Posynomial r;
    for (const auto& t : m_terms) {
        r.m_terms.push_back(t.scaled(c));
    }
    return r;
}

double Posynomial::eval(std::span<const double> y) const
{
    double s = 0;
    for (const auto& t : m_terms) {
        s += t.eval(y);
    }
    return s;
}

std::size_t GeometricProgram::add_variable(std::string name)
{
    m_names.push_back(std::move(name));
    return m_names.size() - 1;
}

std::optional<std::size_t> GeometricProgram::find_variable(const std::string& name) const
{
    auto it = std::find(m_names.begin(), m_names.end(), name);
    if (it == m_names.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - m_names.begin());
}

void GeometricProgram::set_objective(Posynomial f)
{
    m_objective = std::move(f);
}

void GeometricProgram::add_constraint(Posynomial f, std::string label)
{
    m_ineq.push_back(std::move(f));
    m_ineq_labels.push_back(std::move(label));
}

void GeometricProgram::add_equality(Monomial g, std::string label)
{
    (void)label;
    m_eq.push_back(std::move(g));
}

void GeometricProgram::validate() const
{
    const auto n     = variable_count();
    auto check_terms = [n](const std::vector<Monomial>& terms, const std::string& what) {
        for (const auto& t : terms) {
            for (const auto& e : t.exponents()) {
                if (e.first >= n) {
                    throw InvalidArgument(what + " references an unknown variable");
                }
            }
        }
    };
    if (m_objective.empty()) {
        throw InvalidArgument("GP objective is empty");
    }
    check_terms(m_objective.terms(), "objective");
    for (std::size_t i = 0; i < m_ineq.size(); ++i) {
        if (m_ineq[i].empty()) {
            throw InvalidArgument("GP constraint " + std::to_string(i) + " is empty");
        }
        check_terms(m_ineq[i].terms(), "constraint " + std::to_string(i));
    }
    check_terms(m_eq, "equality");
}

// ---------------------------------------------------------------------------
// convex form

double LogSumExp::value(std::span<const double> z) const
{
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> v(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) {
        v[k] = b[k];
        for (const auto& [j, c] : a[k]) {
            v[k] += c * z[j];
        }
        mx = std::max(mx, v[k]);
    }
    double s = 0;
    for (double x : v) {
        s += std::exp(x - mx);
    }
    return mx + std::log(s);
}

double LogSumExp::value_grad(std::span<const double> z, std::span<double> grad) const
{
    std::fill(grad.begin(), grad.end(), 0.0);
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> v(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) {
        v[k] = b[k];
        for (const auto& [j, c] : a[k]) {
            v[k] += c * z[j];
        }
        mx = std::max(mx, v[k]);
    }
    double s = 0;
    for (auto& x : v) {
        x = std::exp(x - mx);
        s += x;
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
        for (const auto& [j, c] : a[k]) {
            grad[j] += v[k] / s * c;
        }
    }
    return mx + std::log(s);
}

namespace
{

LogSumExp lse_of(const Posynomial& f)
{
    LogSumExp l;
    for (const auto& t : f.terms()) {
        l.b.push_back(std::log(t.coeff()));
        l.a.push_back(t.exponents());
    }
    return l;
}

} // namespace

ConvexForm to_convex(const GeometricProgram& gp)
{
    gp.validate();
    ConvexForm cf;
    cf.dim       = gp.variable_count();
    cf.objective = lse_of(gp.objective());
    for (const auto& c : gp.constraints()) {
        cf.constraints.push_back(lse_of(c));
    }
    for (const auto& g : gp.equalities()) {
        cf.equalities.push_back({g.exponents(), std::log(g.coeff())});
    }
    return cf;
}

void ConvexForm::print(std::ostream& os) const
{
    auto row = [&os](double b, const SparseRow& a) {
        os << "  " << b;
        for (const auto& [j, c] : a) {
            os << (c < 0 ? " - " : " + ") << std::abs(c) << "*z" << j;
        }
        os << '\n';
    };
    os << "dim " << dim << "\nobjective lse of\n";
    for (std::size_t k = 0; k < objective.b.size(); ++k) {
        row(objective.b[k], objective.a[k]);
    }
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        os << "constraint " << i << " lse of\n";
        for (std::size_t k = 0; k < constraints[i].b.size(); ++k) {
            row(constraints[i].b[k], constraints[i].a[k]);
        }
    }
    for (std::size_t i = 0; i < equalities.size(); ++i) {
        os << "equality " << i << '\n';
        row(equalities[i].b, equalities[i].a);
    }
}

const char* to_string(GpStatus s)
{
    switch (s) {
    case GpStatus::Optimal:
        return "optimal";
    case GpStatus::Infeasible:
        return "infeasible";
    case GpStatus::MaxIter:
        return "max-iter";
    }
    return "unknown";
}

double KktReport::max() const
{
    return std::max({stationarity, primal, complementarity});
}

// ---------------------------------------------------------------------------
// equality elimination: z = z0 + N w

namespace
{

struct Elimination {
    std::size_t dim = 0;
    std::vector<std::size_t> free_cols;
    VectorXd z0;
    MatrixXd N; // dim x free
    bool identity    = true;
    bool consistent  = true;

    VectorXd expand(const VectorXd& w) const
    {
        return identity ? w : VectorXd(z0 + N * w);
    }

    // Reduce a sparse affine row (a, b) to the free coordinates.
    std::pair<SparseRow, double> reduce(const SparseRow& a, double b) const
    {
        if (identity) {
            return {a, b};
        }
        VectorXd dense = VectorXd::Zero(static_cast<Eigen::Index>(N.cols()));
        double bb      = b;
        for (const auto& [j, c] : a) {
            dense += c * N.row(static_cast<Eigen::Index>(j)).transpose();
            bb += c * z0[static_cast<Eigen::Index>(j)];
        }
        SparseRow r;
        for (Eigen::Index k = 0; k < dense.size(); ++k) {
            if (dense[k] != 0.0) {
                r.emplace_back(static_cast<std::size_t>(k), dense[k]);
            }
        }
        return {r, bb};
    }

    LogSumExp reduce(const LogSumExp& l) const
    {
        LogSumExp r;
        for (std::size_t k = 0; k < l.b.size(); ++k) {
            auto [a, b] = reduce(l.a[k], l.b[k]);
            r.a.push_back(std::move(a));
            r.b.push_back(b);
        }
        return r;
    }
};

Elimination eliminate(const ConvexForm& cf)
{
    Elimination el;
    el.dim        = cf.dim;
    const auto n  = static_cast<Eigen::Index>(cf.dim);
    const auto ne = static_cast<Eigen::Index>(cf.equalities.size());
    if (ne == 0) {
        for (std::size_t j = 0; j < cf.dim; ++j) {
            el.free_cols.push_back(j);
        }
        return el;
    }
    el.identity = false;
    MatrixXd E  = MatrixXd::Zero(ne, n);
    VectorXd rhs(ne);
    for (Eigen::Index r = 0; r < ne; ++r) {
        for (const auto& [j, c] : cf.equalities[static_cast<std::size_t>(r)].a) {
            E(r, static_cast<Eigen::Index>(j)) += c;
        }
        rhs[r] = -cf.equalities[static_cast<std::size_t>(r)].b;
    }
    std::vector<Eigen::Index> pivot_of_row(static_cast<std::size_t>(ne), -1);
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    const double scale = std::max(1.0, E.cwiseAbs().maxCoeff());
    for (Eigen::Index r = 0; r < ne; ++r) {
        Eigen::Index best = -1;
        double bv         = 0;
        for (Eigen::Index c = 0; c < n; ++c) {
            if (!is_pivot[static_cast<std::size_t>(c)] && std::abs(E(r, c)) > bv) {
                bv   = std::abs(E(r, c));
                best = c;
            }
        }
        if (best < 0 || bv <= 1e-12 * scale) {
            if (std::abs(rhs[r]) > 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) {
                el.consistent = false;
            }
            continue;
        }
        const double piv = E(r, best);
        E.row(r) /= piv;
        rhs[r] /= piv;
        for (Eigen::Index o = 0; o < ne; ++o) {
            if (o != r && E(o, best) != 0.0) {
                const double f = E(o, best);
                E.row(o) -= f * E.row(r);
                rhs[o] -= f * rhs[r];
            }
        }
        pivot_of_row[static_cast<std::size_t>(r)] = best;
        is_pivot[static_cast<std::size_t>(best)]  = true;
    }
    for (std::size_t j = 0; j < cf.dim; ++j) {
        if (!is_pivot[j]) {
            el.free_cols.push_back(j);
        }
    }
    const auto nf = static_cast<Eigen::Index>(el.free_cols.size());
    el.z0         = VectorXd::Zero(n);
    el.N          = MatrixXd::Zero(n, nf);
    for (Eigen::Index k = 0; k < nf; ++k) {
        el.N(static_cast<Eigen::Index>(el.free_cols[static_cast<std::size_t>(k)]), k) = 1.0;
    }
    for (Eigen::Index r = 0; r < ne; ++r) {
        const auto c = pivot_of_row[static_cast<std::size_t>(r)];
        if (c < 0) {
            continue;
        }
        el.z0[c] = rhs[r];
        for (Eigen::Index k = 0; k < nf; ++k) {
            el.N(c, k) = -E(r, static_cast<Eigen::Index>(el.free_cols[static_cast<std::size_t>(k)]));
        }
    }
    return el;
}

// ---------------------------------------------------------------------------
// barrier method on  min F_0(w)  s.t.  F_i(w) <= 0

struct LseTerm {
    double value;
    VectorXd grad;
    std::vector<double> weights; // softmax weights per row
};

LseTerm eval_lse(const LogSumExp& l, const VectorXd& w)
{
    LseTerm r;
    r.grad = VectorXd::Zero(w.size());
    r.weights.resize(l.b.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < l.b.size(); ++k) {
        double v = l.b[k];
        for (const auto& [j, c] : l.a[k]) {
            v += c * w[static_cast<Eigen::Index>(j)];
        }
        r.weights[k] = v;
        mx           = std::max(mx, v);
    }
    double s = 0;
    for (auto& v : r.weights) {
        v = std::exp(v - mx);
        s += v;
    }
    for (std::size_t k = 0; k < l.b.size(); ++k) {
        r.weights[k] /= s;
        for (const auto& [j, c] : l.a[k]) {
            r.grad[static_cast<Eigen::Index>(j)] += r.weights[k] * c;
        }
    }
    r.value = mx + std::log(s);
    return r;
}

// H += alpha * sum_k pi_k a_k a_k^T + beta * g g^T, restricted to the support.
void add_lse_hessian(MatrixXd& H, const LogSumExp& l, const LseTerm& t, double alpha, double beta,
                     std::vector<std::size_t>& support, std::vector<char>& mark)
{
    for (std::size_t k = 0; k < l.b.size(); ++k) {
        const double wk = alpha * t.weights[k];
        if (wk == 0.0) {
            continue;
        }
        for (const auto& [i, ci] : l.a[k]) {
            if (!mark[i]) {
                mark[i] = 1;
                support.push_back(i);
            }
            for (const auto& [j, cj] : l.a[k]) {
                H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += wk * ci * cj;
            }
        }
    }
    for (auto i : support) {
        const double gi = t.grad[static_cast<Eigen::Index>(i)];
        for (auto j : support) {
            H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
                beta * gi * t.grad[static_cast<Eigen::Index>(j)];
        }
    }
    for (auto i : support) {
        mark[i] = 0;
    }
    support.clear();
}

struct BarrierProblem {
    LogSumExp objective;
    std::vector<LogSumExp> constraints;
    std::size_t dim = 0;
};

struct BarrierResult {
    VectorXd w;
    double t        = 1;
    bool converged  = false;
    bool stopped    = false;
};

class BarrierSolver
{
public:
    BarrierSolver(const BarrierProblem& p, const GpOptions& opt, std::size_t& newton_count, const char* tag)
        : m_p(p)
        , m_opt(opt)
        , m_newton(newton_count)
        , m_tag(tag)
        , m_mark(p.dim, 0)
    {
    }

    // Constraint values, or nullopt if some F_i >= 0.
    std::optional<std::vector<double>> constraint_values(const VectorXd& w) const
    {
        std::vector<double> f(m_p.constraints.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] = m_p.constraints[i].value(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
            if (!(f[i] < 0)) {
                return std::nullopt;
            }
        }
        return f;
    }

    double barrier_value(const VectorXd& w, double t) const
    {
        auto f = constraint_values(w);
        if (!f) {
            return std::numeric_limits<double>::infinity();
        }
        double v = t * m_p.objective.value(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
        for (double fi : *f) {
            v -= std::log(-fi);
        }
        return v;
    }

    template <class Stop>
    BarrierResult run(VectorXd w, Stop early_stop)
    {
        BarrierResult res;
        const double m    = static_cast<double>(m_p.constraints.size());
        const double mu   = 10.0;
        constexpr std::size_t max_inner = 100;
        double t          = 1.0;
        const auto dim    = static_cast<Eigen::Index>(m_p.dim);
        MatrixXd H(dim, dim);
        VectorXd g(dim);
        for (;;) {
            // centering
            std::size_t inner = 0;
            for (;;) {
                if (m_newton >= m_opt.max_newton) {
                    res.w = w;
                    res.t = t;
                    return res;
                }
                ++m_newton;
                H.setZero();
                g.setZero();
                auto obj = eval_lse(m_p.objective, w);
                g += t * obj.grad;
                add_lse_hessian(H, m_p.objective, obj, t, -t, m_support, m_mark);
                for (const auto& c : m_p.constraints) {
                    auto ct         = eval_lse(c, w);
                    const double nf = -ct.value;
                    g += ct.grad / nf;
                    add_lse_hessian(H, c, ct, 1.0 / nf, 1.0 / (nf * nf) - 1.0 / nf, m_support, m_mark);
                }
                VectorXd dw = newton_direction(H, g);
                const double lambda2 = -g.dot(dw);
                if (m_opt.debug) {
                    *m_opt.debug << m_tag << " t=" << t << " it=" << m_newton << " F0=" << obj.value
                                 << " lambda2=" << lambda2 << '\n';
                }
                if (!(lambda2 > 2e-10)) {
                    break;
                }
                // backtracking; near the center the full step is taken as
                // long as it stays in the domain, because the Armijo test
                // drowns in rounding once t * F_0 is large
                const double phi0 = barrier_value(w, t);
                double alpha      = 1.0;
                double ph         = phi0;
                VectorXd trial;
                bool moved = false;
                while (alpha > 1e-20) {
                    trial = w + alpha * dw;
                    ph    = barrier_value(trial, t);
                    if (ph <= phi0 - 0.01 * alpha * lambda2 ||
                        (alpha == 1.0 && lambda2 < 1e-2 && ph <= phi0 + 1e-13 * std::abs(phi0))) {
                        moved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if (!moved || ++inner > max_inner) {
                    if (moved) {
                        w = trial;
                    }
                    break;
                }
                w = trial;
                if (early_stop(w)) {
                    res.w       = w;
                    res.t       = t;
                    res.stopped = true;
                    return res;
                }
            }
            if (m == 0 || m / t <= m_opt.tol) {
                res.w         = w;
                res.t         = t;
                res.converged = true;
                return res;
            }
            t *= mu;
        }
    }

private:
    // Solves H d = -g after symmetric Jacobi scaling; adds a growing ridge
    // if the scaled matrix is not numerically positive definite.
    static VectorXd newton_direction(const MatrixXd& H, const VectorXd& g)
    {
        VectorXd dinv = H.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
        MatrixXd Hs   = dinv.asDiagonal() * H * dinv.asDiagonal();
        VectorXd gs   = dinv.cwiseProduct(g);
        for (double reg = 0;; reg = reg == 0 ? 1e-14 : reg * 10) {
            MatrixXd R = Hs;
            R.diagonal().array() += reg;
            Eigen::LLT<MatrixXd> llt(R);
            if (llt.info() == Eigen::Success) {
                VectorXd d = dinv.cwiseProduct(llt.solve(-gs));
                if (d.allFinite()) {
                    return d;
                }
            }
        }
    }

    const BarrierProblem& m_p;
    const GpOptions& m_opt;
    std::size_t& m_newton;
    const char* m_tag;
    std::vector<std::size_t> m_support;
    std::vector<char> m_mark;
};

std::vector<double> gradient_dense(const LogSumExp& l, const VectorXd& z)
{
    std::vector<double> g(static_cast<std::size_t>(z.size()));
    l.value_grad(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())), g);
    return g;
}

// Nonnegative least squares min ||A x - b||, x >= 0 (Lawson-Hanson).
VectorXd nnls(const MatrixXd& A, const VectorXd& b)
{
    const auto n = A.cols();
    VectorXd x   = VectorXd::Zero(n);
    if (n == 0) {
        return x;
    }
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());
    for (int outer = 0; outer < 3 * n + 10; ++outer) {
        VectorXd wv        = A.transpose() * (b - A * x);
        Eigen::Index best  = -1;
        double bv          = tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && wv[j] > bv) {
                bv   = wv[j];
                best = j;
            }
        }
        if (best < 0) {
            break;
        }
        passive[static_cast<std::size_t>(best)] = true;
        for (int inner = 0; inner < 3 * n + 10; ++inner) {
            std::vector<Eigen::Index> P;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)]) {
                    P.push_back(j);
                }
            }
            MatrixXd AP(A.rows(), static_cast<Eigen::Index>(P.size()));
            for (std::size_t k = 0; k < P.size(); ++k) {
                AP.col(static_cast<Eigen::Index>(k)) = A.col(P[k]);
            }
            VectorXd zP = AP.colPivHouseholderQr().solve(b);
            bool all_pos = true;
            for (Eigen::Index k = 0; k < zP.size(); ++k) {
                all_pos = all_pos && zP[k] > 0;
            }
            if (all_pos) {
                x.setZero();
                for (std::size_t k = 0; k < P.size(); ++k) {
                    x[P[k]] = zP[static_cast<Eigen::Index>(k)];
                }
                break;
            }
            double alpha = 1.0;
            for (std::size_t k = 0; k < P.size(); ++k) {
                const double zk = zP[static_cast<Eigen::Index>(k)];
                if (zk <= 0) {
                    alpha = std::min(alpha, x[P[k]] / (x[P[k]] - zk));
                }
            }
            for (std::size_t k = 0; k < P.size(); ++k) {
                x[P[k]] += alpha * (zP[static_cast<Eigen::Index>(k)] - x[P[k]]);
                if (x[P[k]] <= 1e-15) {
                    x[P[k]]                        = 0;
                    passive[static_cast<std::size_t>(P[k])] = false;
                }
            }
        }
    }
    return x;
}

KktReport kkt_residuals(const ConvexForm& cf, const Elimination& el, const VectorXd& z,
                        std::optional<std::span<const double>> duals, double active_tol)
{
    KktReport rep;
    const std::size_t m = cf.constraints.size();
    std::vector<double> F(m);
    for (std::size_t i = 0; i < m; ++i) {
        F[i]        = cf.constraints[i].value(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
        rep.primal = std::max(rep.primal, F[i]);
    }
    for (const auto& eq : cf.equalities) {
        double v = eq.b;
        for (const auto& [j, c] : eq.a) {
            v += c * z[static_cast<Eigen::Index>(j)];
        }
        rep.primal = std::max(rep.primal, std::abs(v));
    }
    auto reduce = [&el](const std::vector<double>& g) {
        VectorXd gv = Eigen::Map<const VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
        return el.identity ? gv : VectorXd(el.N.transpose() * gv);
    };
    VectorXd g0 = reduce(gradient_dense(cf.objective, z));
    std::vector<VectorXd> gi(m);
    std::vector<double> lambda(m, 0.0);
    if (duals) {
        if (duals->size() != m) {
            throw InvalidArgument("check_kkt: one multiplier per constraint required");
        }
        for (std::size_t i = 0; i < m; ++i) {
            lambda[i] = (*duals)[i];
        }
    }
    else {
        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < m; ++i) {
            if (F[i] >= -active_tol) {
                active.push_back(i);
            }
        }
        MatrixXd A(g0.size(), static_cast<Eigen::Index>(active.size()));
        for (std::size_t k = 0; k < active.size(); ++k) {
            A.col(static_cast<Eigen::Index>(k)) = reduce(gradient_dense(cf.constraints[active[k]], z));
        }
        VectorXd lam = nnls(A, -g0);
        for (std::size_t k = 0; k < active.size(); ++k) {
            lambda[active[k]] = lam[static_cast<Eigen::Index>(k)];
        }
    }
    VectorXd stat = g0;
    for (std::size_t i = 0; i < m; ++i) {
        if (lambda[i] != 0.0) {
            stat += lambda[i] * reduce(gradient_dense(cf.constraints[i], z));
        }
        rep.complementarity = std::max(rep.complementarity, std::abs(lambda[i] * F[i]));
        if (lambda[i] < 0) {
            rep.complementarity = std::max(rep.complementarity, -lambda[i]);
        }
    }
    rep.stationarity = stat.size() ? stat.cwiseAbs().maxCoeff() : 0.0;
    return rep;
}

// The barrier multipliers 1/(-t F_i) lose accuracy on constraints with
// |F_i| near rounding level. Re-fit those multipliers by nonnegative least
// squares on the stationarity condition, keeping all others fixed.
std::vector<double> refine_duals(const ConvexForm& cf, const Elimination& el, const VectorXd& z,
                                 const std::vector<double>& duals)
{
    const std::size_t m = cf.constraints.size();
    auto reduce         = [&el](const std::vector<double>& g) {
        VectorXd gv = Eigen::Map<const VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
        return el.identity ? gv : VectorXd(el.N.transpose() * gv);
    };
    VectorXd rhs = reduce(gradient_dense(cf.objective, z));
    std::vector<std::size_t> tight;
    std::vector<VectorXd> grads;
    for (std::size_t i = 0; i < m; ++i) {
        const double Fi = cf.constraints[i].value(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
        VectorXd gi     = reduce(gradient_dense(cf.constraints[i], z));
        if (Fi >= -1e-8) {
            tight.push_back(i);
            grads.push_back(std::move(gi));
        }
        else {
            rhs += duals[i] * gi;
        }
    }
    std::vector<double> out = duals;
    if (tight.empty()) {
        return out;
    }
    MatrixXd A(rhs.size(), static_cast<Eigen::Index>(tight.size()));
    for (std::size_t k = 0; k < tight.size(); ++k) {
        A.col(static_cast<Eigen::Index>(k)) = grads[k];
    }
    const VectorXd lam = nnls(A, -rhs);
    for (std::size_t k = 0; k < tight.size(); ++k) {
        out[tight[k]] = lam[static_cast<Eigen::Index>(k)];
    }
    return out;
}

} // namespace

namespace
{

// Bound on |log y| during phase I.
constexpr double phase1_box = 50.0;

} // namespace

GpSolution solve(const GeometricProgram& gp, const GpOptions& opt)
{
    const ConvexForm cf = to_convex(gp);
    if (opt.debug) {
        cf.print(*opt.debug);
    }
    GpSolution sol;
    const Elimination el = eliminate(cf);
    const std::size_t m  = cf.constraints.size();
    if (!el.consistent) {
        sol.status = GpStatus::Infeasible;
        sol.values.assign(cf.dim, 1.0);
        return sol;
    }

    BarrierProblem bp;
    bp.dim       = el.free_cols.size();
    bp.objective = el.reduce(cf.objective);
    for (const auto& c : cf.constraints) {
        bp.constraints.push_back(el.reduce(c));
    }

    VectorXd w = VectorXd::Zero(static_cast<Eigen::Index>(bp.dim));
    auto finish_values = [&](const VectorXd& wf) {
        VectorXd z = el.expand(wf);
        sol.values.resize(cf.dim);
        for (std::size_t j = 0; j < cf.dim; ++j) {
            sol.values[j] = std::exp(z[static_cast<Eigen::Index>(j)]);
        }
        sol.objective = gp.objective().eval(sol.values);
        return z;
    };

    // phase I when z = 0 is not strictly feasible
    double fmax = -std::numeric_limits<double>::infinity();
    for (const auto& c : bp.constraints) {
        fmax = std::max(fmax, c.value(std::span<const double>(w.data(), bp.dim)));
    }
    if (m > 0 && !(fmax < 0)) {
        BarrierProblem p1;
        p1.dim          = bp.dim + 1;
        const auto sidx = bp.dim;
        p1.objective.b  = {0.0};
        p1.objective.a  = {{{sidx, 1.0}}};
        for (const auto& c : bp.constraints) {
            LogSumExp a = c;
            for (auto& row : a.a) {
                row.emplace_back(sidx, -1.0);
            }
            p1.constraints.push_back(std::move(a));
        }
        LogSumExp floor;
        floor.b = {-1.0};
        floor.a = {{{sidx, -1.0}}};
        p1.constraints.push_back(floor);
        // Keep |z| bounded so that variables the constraints do not pin
        // cannot drift off to infinity while only s is minimized.
        for (std::size_t j = 0; j < bp.dim; ++j) {
            for (double sign : {1.0, -1.0}) {
                LogSumExp box;
                box.b = {-phase1_box};
                box.a = {{{j, sign}}};
                p1.constraints.push_back(std::move(box));
            }
        }

        VectorXd w1                          = VectorXd::Zero(static_cast<Eigen::Index>(p1.dim));
        w1[static_cast<Eigen::Index>(sidx)] = std::max(fmax, -1.0) + 1.0;
        BarrierSolver s1(p1, opt, sol.newton_iterations, "phase1");
        auto strictly_feasible = [&](const VectorXd& v) {
            const VectorXd head = v.head(static_cast<Eigen::Index>(bp.dim));
            for (const auto& c : bp.constraints) {
                if (!(c.value(std::span<const double>(head.data(), bp.dim)) < -1e-3)) {
                    return false;
                }
            }
            return true;
        };
        auto r1 = s1.run(w1, strictly_feasible);
        const double s_star = r1.w[static_cast<Eigen::Index>(sidx)];
        sol.phase1_value    = s_star;
        if (opt.debug) {
            *opt.debug << "phase1 s*=" << s_star << (r1.stopped ? " (early exit)" : "") << '\n';
        }
        w = r1.w.head(static_cast<Eigen::Index>(bp.dim));
        bool feasible = r1.stopped;
        if (!feasible) {
            feasible = true;
            for (const auto& c : bp.constraints) {
                if (!(c.value(std::span<const double>(w.data(), bp.dim)) < 0)) {
                    feasible = false;
                }
            }
        }
        if (!feasible) {
            sol.status = (r1.converged || s_star > 0) ? GpStatus::Infeasible : GpStatus::MaxIter;
            finish_values(w);
            return sol;
        }
    }

    BarrierSolver s2(bp, opt, sol.newton_iterations, "phase2");
    auto r2 = s2.run(w, [](const VectorXd&) {
        return false;
    });
    VectorXd z = finish_values(r2.w);
    sol.status = r2.converged ? GpStatus::Optimal : GpStatus::MaxIter;
    sol.duals.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double Fi = bp.constraints[i].value(std::span<const double>(r2.w.data(), bp.dim));
        sol.duals[i]    = 1.0 / (-r2.t * Fi);
    }
    sol.kkt_residual = kkt_residuals(cf, el, z, std::span<const double>(sol.duals), 0.0).max();
    auto refined     = refine_duals(cf, el, z, sol.duals);
    const double rr  = kkt_residuals(cf, el, z, std::span<const double>(refined), 0.0).max();
    if (rr < sol.kkt_residual) {
        sol.kkt_residual = rr;
        sol.duals        = std::move(refined);
    }
    if (opt.debug) {
        *opt.debug << "status " << to_string(sol.status) << " objective " << sol.objective << " kkt "
                   << sol.kkt_residual << '\n';
    }
    return sol;
}

KktReport check_kkt(const GeometricProgram& gp, std::span<const double> y,
                    std::optional<std::span<const double>> duals, double active_tol)
{
    const ConvexForm cf = to_convex(gp);
    if (y.size() != cf.dim) {
        throw InvalidArgument("check_kkt: one value per variable required");
    }
    VectorXd z(static_cast<Eigen::Index>(cf.dim));
    for (std::size_t j = 0; j < cf.dim; ++j) {
        if (!(y[j] > 0) || !std::isfinite(y[j])) {
            throw InvalidArgument("check_kkt: variable values must be positive");
        }
        z[static_cast<Eigen::Index>(j)] = std::log(y[j]);
    }
    return kkt_residuals(cf, eliminate(cf), z, duals, active_tol);
}

} // namespace etsis
