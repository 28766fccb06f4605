#pragma once

// Uniform grids over bounded domains in C^n = R^{2n}, space-time fields on
// them, the finite-difference complex Hessian and the time / space-time
// sup- and inf-convolutions.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parahess/hessian_core.hpp"

namespace parahess {

/// Coordinates are ordered (x_1..x_n, y_1..y_n).
using Point = std::vector<double>;
using SpatialField = std::vector<double>;

using SpaceFn = std::function<double(std::span<const double> z)>;
using TimeSpaceFn = std::function<double(double t, std::span<const double> z)>;
using NonlinearityFn = std::function<double(double t, std::span<const double> z, double r)>;

struct DefiningFunction {
    SpaceFn value;
    /// Optional analytic gradient; central differences are used when empty.
    std::function<Point(std::span<const double>)> gradient;

    Point grad(std::span<const double> z) const;
};

/// Cubic lattice { i*h : |i| <= half_count }^{2n} centred at the origin.
struct BoxGrid {
    int n = 1;
    double h = 1.0;
    int half_count = 1;

    int dim() const { return 2 * n; }
    std::size_t axis_count() const { return static_cast<std::size_t>(2 * half_count + 1); }
    std::size_t node_count() const;
    Point coords(std::size_t box_index) const;
    /// Lattice multi-index in [-half_count, half_count]^{2n}.
    std::vector<int> multi_index(std::size_t box_index) const;
    std::optional<std::size_t> index_of(std::span<const int> multi) const;
};

enum class NodeKind : std::uint8_t { interior, boundary, exterior };

/// Result of partitioning the box: interior iff rho < 0 with the whole
/// Hessian stencil inside the box; boundary iff non-interior and touched by
/// the stencil of some interior node; exterior otherwise.
struct NodeClassification {
    std::vector<NodeKind> kind;
    /// Projection onto {rho = 0} for boundary nodes (Newton iteration along
    /// grad rho); empty for other nodes.
    std::vector<Point> projected;
};

/// Stencil offsets used by fd_complex_hessian: axis pairs (+-e_a) and, for
/// n >= 2, the cross offsets +-e_a +-e_b between axes of distinct complex
/// coordinates.
std::vector<std::vector<int>> hessian_stencil_offsets(int n);

NodeClassification classify_nodes(const BoxGrid& box, const DefiningFunction& rho);

/// Newton iteration z <- z - rho(z) grad rho / |grad rho|^2 until |rho| / |grad rho| <= 1e-13.
Point project_to_zero_set(const DefiningFunction& rho, std::span<const double> z);

class GridDomain {
public:
    /// Builds masks and stencils for the box and rho; the strict
    /// pseudoconvexity certificate lambda(H rho) - (1,...,1) in Gamma is
    /// evaluated at every interior and boundary node for `cone`.
    /// Throws ConfigError on empty interior or failed certificate.
    static std::shared_ptr<const GridDomain> make(BoxGrid box, DefiningFunction rho, const ConeSpec& cone,
                                                  std::string label = "custom");

    int n() const { return box_.n; }
    int dim() const { return box_.dim(); }
    double h() const { return box_.h; }
    const BoxGrid& box() const { return box_; }
    const std::string& label() const { return label_; }
    const DefiningFunction& rho_fn() const { return rho_; }

    /// Active nodes are interior and boundary nodes; fields index them 0..active_count()-1.
    std::size_t active_count() const { return active_box_.size(); }
    std::size_t box_index(std::size_t active) const { return active_box_[active]; }
    /// -1 for exterior box nodes.
    std::int64_t active_index(std::size_t box_index) const { return box_active_[box_index]; }
    NodeKind kind(std::size_t active) const { return kind_[active]; }
    bool is_interior(std::size_t active) const { return kind_[active] == NodeKind::interior; }
    std::span<const double> coords(std::size_t active) const;
    double rho(std::size_t active) const { return rho_values_[active]; }
    /// Projection of a boundary node onto {rho = 0}.
    std::span<const double> projected(std::size_t active) const;

    const std::vector<std::size_t>& interior() const { return interior_; }
    const std::vector<std::size_t>& boundary() const { return boundary_; }
    const std::vector<NodeKind>& box_kinds() const { return box_kind_; }

    /// For interior node number i (position in interior()): active indices of
    /// its stencil neighbours, laid out as [+e_0, -e_0, +e_1, -e_1, ...]
    /// followed by four entries (++, --, +-, -+) per mixed axis pair.
    std::span<const std::size_t> stencil(std::size_t interior_pos) const;
    /// Position of an active node in interior(), or -1.
    std::int64_t interior_position(std::size_t active) const { return interior_pos_[active]; }

    /// Mixed axis pairs (a, b), a < b, of distinct complex coordinates.
    const std::vector<std::pair<int, int>>& mixed_pairs() const { return mixed_pairs_; }

    /// min over interior/boundary nodes of the cone margin of lambda(H rho) - 1.
    double pseudoconvexity_margin() const { return margin_; }
    /// sup(-rho) over active nodes.
    double depth() const { return depth_; }

    /// Evaluates a function at every active node.
    SpatialField sample(const SpaceFn& fn) const;

private:
    GridDomain() = default;

    BoxGrid box_;
    DefiningFunction rho_;
    std::string label_;
    std::vector<NodeKind> box_kind_;
    std::vector<std::int64_t> box_active_;
    std::vector<std::size_t> active_box_;
    std::vector<NodeKind> kind_;
    std::vector<double> coords_;
    std::vector<double> rho_values_;
    std::vector<Point> projected_;
    std::vector<std::size_t> interior_;
    std::vector<std::size_t> boundary_;
    std::vector<std::int64_t> interior_pos_;
    std::vector<std::size_t> stencil_;
    std::size_t stencil_width_ = 0;
    std::vector<std::pair<int, int>> mixed_pairs_;
    double margin_ = 0.0;
    double depth_ = 0.0;
};

/// Ball { |z| < R } with rho = a (|z|^2 - R^2), so H rho = a I and the
/// pseudoconvexity margin is a - 1. Requires a > 1.
std::shared_ptr<const GridDomain> make_ball_domain(int n, double radius, double scale, double h);

/// Uniform time grid t_m = m T / M, m = 0..M.
struct TimeGrid {
    double T = 1.0;
    int M = 1;

    static TimeGrid make(double T, int M);
    double dt() const { return T / M; }
    double t(int m) const { return m == M ? T : m * dt(); }
    /// Grid index of t0; throws ArgumentError when t0 is not a grid node.
    int index_of(double t0) const;
    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Real values on (time node, active node) for time indices in
/// [m_begin, m_end]. NaN marks nodes an operator left undefined.
class SpaceTimeField {
public:
    SpaceTimeField() = default;
    SpaceTimeField(std::shared_ptr<const GridDomain> domain, TimeGrid time, int m_begin, int m_end,
                   double fill = 0.0);
    SpaceTimeField(std::shared_ptr<const GridDomain> domain, TimeGrid time, double fill = 0.0)
        : SpaceTimeField(std::move(domain), time, 0, time.M, fill) {}

    const std::shared_ptr<const GridDomain>& domain() const { return domain_; }
    const TimeGrid& time() const { return time_; }
    int m_begin() const { return m_begin_; }
    int m_end() const { return m_end_; }
    bool has_time(int m) const { return m >= m_begin_ && m <= m_end_; }
    std::size_t node_count() const { return nodes_; }

    double at(int m, std::size_t node) const { return values_[offset(m) + node]; }
    double& at(int m, std::size_t node) { return values_[offset(m) + node]; }
    std::span<const double> slice(int m) const { return {values_.data() + offset(m), nodes_}; }
    std::span<double> slice(int m) { return {values_.data() + offset(m), nodes_}; }
    void set_slice(int m, std::span<const double> values);

    const std::vector<double>& values() const { return values_; }
    /// max - min over defined (non-NaN) values.
    double oscillation() const;
    double max_abs() const;
    bool same_grid(const SpaceTimeField& o) const;

private:
    std::size_t offset(int m) const;

    std::shared_ptr<const GridDomain> domain_;
    TimeGrid time_;
    int m_begin_ = 0;
    int m_end_ = 0;
    std::size_t nodes_ = 0;
    std::vector<double> values_;
};

/// Complex Hessian of a slice at an interior node by centred second
/// differences; exact on quadratic polynomials.
HermitianMatrix fd_complex_hessian(const GridDomain& domain, std::span<const double> slice, std::size_t node);
/// Same, addressed by position in domain.interior().
HermitianMatrix fd_complex_hessian_at(const GridDomain& domain, std::span<const double> slice,
                                      std::size_t interior_pos);

/// u^k(t,z) = max over grid shifts |s| <= A/k of u(t+s,z) - k|s|, on time
/// nodes in (A/k, T - A/k). Requires A > osc(u) and A/k < T/2.
SpaceTimeField sup_convolution_time(const SpaceTimeField& u, double k, double A);
/// u_k(t,z) = min over grid shifts |s| <= A/k of u(t+s,z) + k|s|.
SpaceTimeField inf_convolution_time(const SpaceTimeField& u, double k, double A);

struct SpacetimeConvolution {
    SpaceTimeField field;
    /// eps below the grid spacing: only the node itself is in the window.
    bool degenerate = false;
    std::vector<char> spatial_mask;
};

/// w_eps(t,z) = max over grid samples of w(s,xi) - (A/eps^2)(|t-s|^2 + |z-xi|^2),
/// defined for eps < t < T - eps at interior nodes whose eps-ball holds only
/// interior nodes (NaN elsewhere).
SpacetimeConvolution sup_convolution_spacetime(const SpaceTimeField& w, double eps, double A);

/// Copy of the slice at grid time t0.
SpatialField time_slice(const SpaceTimeField& u, double t0);

/// Pointwise max(g, eps_g).
SpatialField g_mollify(std::span<const double> g, double eps_g);

/// Field CSV: header t,x1..xn,y1..yn,value; rows ordered by (t, node); 17
/// significant digits. NaN entries are skipped.
void write_field_csv(const SpaceTimeField& field, const std::string& path);
std::string field_csv_string(const SpaceTimeField& field);
/// Reads a full-window field and checks that it matches the given grid
/// (ArgumentError on mismatch).
SpaceTimeField read_field_csv(const std::string& path, std::shared_ptr<const GridDomain> domain, TimeGrid time);

/// Writes to path + ".tmp" and renames into place.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace parahess
