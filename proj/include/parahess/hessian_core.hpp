#pragma once

// Gårding cones, symmetric eigenvalue operators and the Hessian-type
// operator F(H) = f(lambda(H)) on Hermitian matrices.

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace parahess {

using cplx = std::complex<double>;

/// The Gårding cone Gamma_k in R^n: { x : sigma_l(x) > 0 for l = 1..k }.
struct ConeSpec {
    int n = 1;
    int k = 1;

    /// Validating constructor; throws ArgumentError unless 1 <= k <= n.
    static ConeSpec make(int n, int k);
    friend bool operator==(const ConeSpec&, const ConeSpec&) = default;
};

/// sigma_l(x): sum over all l-subsets of the product of entries. l in [1, n].
double elementary_symmetric(std::span<const double> x, int l);

/// sigma_0(x)..sigma_n(x) via the product expansion of prod(1 + x_i t).
std::vector<double> elementary_symmetric_all(std::span<const double> x);

/// Default membership slack 1e-10 * (1 + |x|_inf).
double default_membership_slack(std::span<const double> x);

/// True iff sigma_l(x) > -slack for l = 1..k. slack > 0 tests the closure.
bool in_cone(std::span<const double> x, const ConeSpec& cone, double slack);

/// Strict interior test: sigma_l(x) > 0 for l = 1..k.
bool in_open_cone(std::span<const double> x, const ConeSpec& cone);

/// Largest s such that x - s*(1,...,1) lies in the closed cone (bisection).
/// Measures how deep x sits inside the cone along the diagonal.
double cone_margin(std::span<const double> x, const ConeSpec& cone);

/// User-supplied symmetric function. The membership predicate defaults to
/// the Gamma_k test of the owning SymOpSpec's cone when left empty.
struct CustomOperator {
    std::string name;
    std::function<double(std::span<const double>)> f;
    std::function<bool(std::span<const double>, double)> membership;
    /// Declared 1-homogeneity; enables the homogeneity audit.
    bool homogeneous = false;
};

enum class SymOpKind { sigma_k_root, custom };

/// The symmetric function f on the closed cone. Built-in kind is
/// sigma_k^{1/k}; custom kinds go through CustomOperator.
class SymOpSpec {
public:
    static SymOpSpec sigma_k_root(int n, int k);
    static SymOpSpec custom(ConeSpec cone, CustomOperator op);

    const ConeSpec& cone() const { return cone_; }
    int n() const { return cone_.n; }
    int k() const { return cone_.k; }
    SymOpKind kind() const { return kind_; }
    std::string name() const;
    bool homogeneous() const;

    bool contains(std::span<const double> x, double slack) const;
    /// f(x) without the domain check; sigma_k is clamped at 0.
    double value_unchecked(std::span<const double> x) const;

private:
    ConeSpec cone_;
    SymOpKind kind_ = SymOpKind::sigma_k_root;
    std::shared_ptr<const CustomOperator> custom_;
};

/// f(x) for x in the closed cone; throws DomainError outside (beyond slack).
/// slack < 0 selects default_membership_slack(x).
double f_eval(const SymOpSpec& f, std::span<const double> x, double slack = -1.0);

/// Central-difference gradient, step 1e-6 * (1 + |x|_inf). x must be interior.
std::vector<double> f_gradient(const SymOpSpec& f, std::span<const double> x);

/// n x n complex Hermitian matrix, row-major.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(int n);

    /// Validates Hermitian symmetry within tol * (1 + max|entry|), then
    /// symmetrizes. Throws ArgumentError on violation.
    static HermitianMatrix from_entries(int n, std::vector<cplx> entries, double tol = 1e-12);
    static HermitianMatrix identity(int n);
    static HermitianMatrix diagonal(std::span<const double> d);

    int n() const { return n_; }
    cplx operator()(int j, int k) const { return a_[static_cast<std::size_t>(j * n_ + k)]; }
    /// Sets (j,k) and its mirror (k,j) = conj(value).
    void set(int j, int k, cplx value);
    const std::vector<cplx>& entries() const { return a_; }

    double max_abs() const;
    cplx trace() const;

    HermitianMatrix& operator+=(const HermitianMatrix& o);
    HermitianMatrix& operator-=(const HermitianMatrix& o);
    HermitianMatrix& operator*=(double s);
    friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
    friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
    friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

private:
    int n_ = 0;
    std::vector<cplx> a_;
};

/// Cyclic Jacobi on a dense real symmetric matrix (row-major, m x m).
/// Eigenvalues ascending; eigenvectors (columns, row-major m x m) if requested.
struct SymmetricEigen {
    std::vector<double> values;
    std::vector<double> vectors;
};
SymmetricEigen jacobi_symmetric(std::vector<double> a, int m, bool want_vectors = false);

/// Real 2n x 2n embedding [[Re H, -Im H], [Im H, Re H]].
std::vector<double> real_embedding(const HermitianMatrix& h);

/// Spectrum of H, ascending. Uses Jacobi on the real embedding, where every
/// eigenvalue of H appears twice.
std::vector<double> eigenvalues_hermitian(const HermitianMatrix& h);

/// F(H): f(lambda(H)) on the closed cone, -infinity elsewhere.
class OperatorValue {
public:
    static OperatorValue finite(double v) { return OperatorValue(v); }
    static OperatorValue neg_infinity() {
        return OperatorValue(-std::numeric_limits<double>::infinity());
    }
    bool is_finite() const { return value_ > -std::numeric_limits<double>::infinity(); }
    bool is_neg_infinity() const { return !is_finite(); }
    /// -infinity on the outside branch.
    double value() const { return value_; }

private:
    explicit OperatorValue(double v) : value_(v) {}
    double value_;
};

/// F on eigenvalues already computed (sorted or not).
OperatorValue F_from_eigenvalues(std::span<const double> lambda, const SymOpSpec& f,
                                 double slack = -1.0);
OperatorValue F_eval(const HermitianMatrix& h, const SymOpSpec& f, double slack = -1.0);

/// Complex Hessian of z -> 1/2 <Qz, z> for a real symmetric 2n x 2n Q in
/// coordinates (x_1..x_n, y_1..y_n), z_j = x_j + i y_j.
HermitianMatrix complex_hessian_of_quadratic(std::span<const double> q, int n, double tol = 1e-12);

/// One audited axiom of f.
struct AxiomResult {
    std::string axiom;
    bool pass = true;
    std::size_t tested = 0;
    std::size_t failed = 0;
    /// Smallest observed margin (negative means violated).
    double worst_margin = std::numeric_limits<double>::infinity();
    std::vector<double> witness;
};

struct AxiomReport {
    std::string op;
    std::vector<AxiomResult> results;
    bool pass() const;
    const AxiomResult* find(const std::string& axiom) const;
};

/// Randomized audit of the structural hypotheses on f: symmetry,
/// homogeneity (when declared), midpoint concavity, strict coordinate
/// monotonicity, vanishing on the cone boundary, matrix monotonicity
/// F(M+N) > F(M) for psd N != 0, and coercivity of f(R,...,R).
AxiomReport check_operator_axioms(const SymOpSpec& f, std::size_t samples, std::uint64_t seed,
                                  double tol = 1e-10);

}  // namespace parahess
