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
#ifndef ETSIS_GP_HPP
#define ETSIS_GP_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace etsis
{

/// c * prod_j y_j^{a_j} with c > 0. Exponents are kept sorted by variable
/// index with duplicates merged and zero exponents removed.
class Monomial
{
public:
    using Exponents = std::vector<std::pair<std::size_t, double>>;

    explicit Monomial(double coeff, Exponents exps = {});
    /// c * y_var^a
    static Monomial power(std::size_t var, double a = 1.0, double coeff = 1.0);

    double coeff() const
    {
        return m_coeff;
    }
    const Exponents& exponents() const
    {
        return m_exps;
    }

    Monomial operator*(const Monomial& o) const;
    Monomial scaled(double c) const;
    Monomial pow(double a) const;
    double eval(std::span<const double> y) const;

private:
    double m_coeff;
    Exponents m_exps;
};

/// Sum of monomials. Zero-coefficient terms are dropped when added.
class Posynomial
{
public:
    Posynomial() = default;
    Posynomial(Monomial m);

    Posynomial& operator+=(const Monomial& m);
    Posynomial& operator+=(const Posynomial& p);
    Posynomial operator+(const Posynomial& p) const;
    Posynomial operator*(const Posynomial& p) const;
    Posynomial scaled(double c) const;

    const std::vector<Monomial>& terms() const
    {
        return m_terms;
    }
    bool empty() const
    {
        return m_terms.empty();
    }
    double eval(std::span<const double> y) const;

private:
    std::vector<Monomial> m_terms;
};

/**
 * @brief Geometric program in standard form.
 *
 *   minimize f_0(y)  s.t.  f_i(y) <= 1,  g_k(y) = 1,  y > 0
 *
 * with posynomial f and monomial g. Variables are referred to by the index
 * returned from add_variable().
 */
class GeometricProgram
{
public:
    std::size_t add_variable(std::string name);
    std::size_t variable_count() const
    {
        return m_names.size();
    }
    const std::string& variable_name(std::size_t i) const
    {
        return m_names[i];
    }
    std::optional<std::size_t> find_variable(const std::string& name) const;

    void set_objective(Posynomial f);
    void add_constraint(Posynomial f, std::string label = {});
    void add_equality(Monomial g, std::string label = {});

    const Posynomial& objective() const
    {
        return m_objective;
    }
    const std::vector<Posynomial>& constraints() const
    {
        return m_ineq;
    }
    const std::vector<std::string>& constraint_labels() const
    {
        return m_ineq_labels;
    }
    const std::vector<Monomial>& equalities() const
    {
        return m_eq;
    }

    /// Throws InvalidArgument if a term references an unknown variable or
    /// the objective or a constraint is empty.
    void validate() const;

private:
    std::vector<std::string> m_names;
    Posynomial m_objective;
    std::vector<Posynomial> m_ineq;
    std::vector<std::string> m_ineq_labels;
    std::vector<Monomial> m_eq;
};

/// log sum_k exp(a_k . z + b_k), rows stored sparse.
struct LogSumExp {
    std::vector<double> b;
    std::vector<std::vector<std::pair<std::size_t, double>>> a;

    double value(std::span<const double> z) const;
    /// Value and gradient; `grad` must have the dimension of z.
    double value_grad(std::span<const double> z, std::span<double> grad) const;
};

/// a . z + b = 0
struct AffineEquality {
    std::vector<std::pair<std::size_t, double>> a;
    double b = 0;
};

/// GP after z = log y: minimize F_0(z) s.t. F_i(z) <= 0, affine equalities.
struct ConvexForm {
    std::size_t dim = 0;
    LogSumExp objective;
    std::vector<LogSumExp> constraints;
    std::vector<AffineEquality> equalities;

    void print(std::ostream& os) const;
};

ConvexForm to_convex(const GeometricProgram& gp);

enum class GpStatus
{
    Optimal,
    Infeasible,
    MaxIter
};

const char* to_string(GpStatus s);

struct KktReport {
    double stationarity  = 0;
    double primal        = 0;
    double complementarity = 0;

    double max() const;
};

struct GpSolution {
    GpStatus status = GpStatus::MaxIter;
    std::vector<double> values;
    double objective = 0;
    /// One multiplier per inequality constraint (log-space form).
    std::vector<double> duals;
    double kkt_residual = 0;
    /// Optimal value of the phase-I problem when it ran; positive means the
    /// constraints cannot be satisfied strictly.
    std::optional<double> phase1_value;
    std::size_t newton_iterations = 0;
};

struct GpOptions {
    /// Stop once the duality gap bound m/t drops below tol.
    double tol = 1e-8;
    std::size_t max_newton = 2000;
    /// When set, the convex form and iterate log are written here.
    std::ostream* debug = nullptr;
};

GpSolution solve(const GeometricProgram& gp, const GpOptions& opt = {});

/**
 * Residuals of the log-space KKT system at y. Without explicit multipliers
 * they are estimated by nonnegative least squares over constraints with
 * F_i(log y) >= -active_tol.
 */
KktReport check_kkt(const GeometricProgram& gp, std::span<const double> y,
                    std::optional<std::span<const double>> duals = std::nullopt, double active_tol = 1e-6);

} // namespace etsis

#endif // ETSIS_GP_HPP
