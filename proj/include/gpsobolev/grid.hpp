#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gpsobolev {

/// Maximum spatial dimension supported by grids (node count is n^d).
inline constexpr std::size_t kMaxDimension = 3;

using PointView = std::span<const double>;

/// Multi-index alpha = (alpha_1, ..., alpha_d) with non-negative entries.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> entries);
    MultiIndex(std::initializer_list<int> entries);

    static MultiIndex zero(std::size_t dim);
    static MultiIndex unit(std::size_t dim, std::size_t axis, int count = 1);

    std::size_t dim() const { return entries_.size(); }
    /// |alpha|, the sum of the entries.
    int order() const;
    bool is_zero() const { return order() == 0; }
    int operator[](std::size_t i) const { return entries_[i]; }
    std::span<const int> entries() const { return entries_; }

    MultiIndex operator+(const MultiIndex& other) const;
    auto operator<=>(const MultiIndex&) const = default;
    bool operator==(const MultiIndex&) const = default;

    /// "(1,0)"
    std::string to_string() const;
    static MultiIndex parse(const std::string& text);

private:
    std::vector<int> entries_;
};

/// All alpha with |alpha| <= m in lexicographic order; C(d+m, m) entries.
std::vector<MultiIndex> enumerate_multi_indices(std::size_t dim, int max_order);

/// Axis-aligned box [lower, upper] in R^d.
class Box {
public:
    Box() = default;
    Box(std::vector<double> lower, std::vector<double> upper);
    static Box unit(std::size_t dim);

    std::size_t dim() const { return lower_.size(); }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    double edge(std::size_t axis) const { return upper_[axis] - lower_[axis]; }
    double min_edge() const;
    double volume() const;
    /// Closed-box membership with a small relative slack.
    bool contains(PointView x) const;

    bool operator==(const Box&) const = default;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

enum class QuadratureRule { midpoint, gauss_legendre };

std::string to_string(QuadratureRule rule);
QuadratureRule parse_quadrature_rule(const std::string& name);

enum class Region {
    full,      ///< every node of the grid
    interior,  ///< nodes at distance >= margin from the boundary
};

/// Tensor-product quadrature grid on a box. Immutable after construction;
/// shared between grid functions through GridPtr.
class Grid {
public:
    Grid(Box box, std::size_t nodes_per_dim, QuadratureRule rule, double margin);

    const Box& box() const { return box_; }
    std::size_t dim() const { return box_.dim(); }
    std::size_t nodes_per_dim() const { return n_; }
    std::size_t size() const { return weights_.size(); }
    QuadratureRule rule() const { return rule_; }
    double margin() const { return margin_; }
    /// Whether nodes sit on a uniform lattice (midpoint rule), so that
    /// shifting by one spacing lands on another node.
    bool uniform() const { return rule_ == QuadratureRule::midpoint; }

    /// Nominal spacing (upper - lower) / n along one axis.
    double spacing(std::size_t axis) const { return box_.edge(axis) / static_cast<double>(n_); }
    double max_spacing() const;

    PointView node(std::size_t i) const { return {coords_.data() + i * dim(), dim()}; }
    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> weights() const { return weights_; }
    /// One-dimensional node set along an axis (identical for every axis up to
    /// the affine map of the box).
    std::span<const double> axis_nodes(std::size_t axis) const { return axis_nodes_[axis]; }

    /// Per-axis lattice coordinates of a flat node index (first axis slowest).
    std::vector<std::size_t> lattice(std::size_t i) const;
    std::size_t flat_index(std::span<const std::size_t> lattice) const;
    /// Node reached by moving `offset` lattice steps along `axis`, if any.
    std::optional<std::size_t> shifted(std::size_t i, std::size_t axis, long offset) const;

    bool is_interior(std::size_t i) const { return interior_mask_[i] != 0; }
    std::span<const std::size_t> nodes_in(Region region) const;
    /// Sum of quadrature weights over a region.
    double measure(Region region) const;

private:
    Box box_;
    std::size_t n_;
    QuadratureRule rule_;
    double margin_;
    std::vector<std::vector<double>> axis_nodes_;
    std::vector<double> coords_;
    std::vector<double> weights_;
    std::vector<char> interior_mask_;
    std::vector<std::size_t> all_nodes_;
    std::vector<std::size_t> interior_nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a tensor grid. When `margin` is empty it defaults to twice the
/// largest grid spacing (fewer spacings when the box is too small for that).
GridPtr build_grid(const Box& box, std::size_t n, QuadratureRule rule = QuadratureRule::midpoint,
                   std::optional<double> margin = std::nullopt);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre_rule(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

/// Real values attached to the nodes of a grid. Nodes where a value is not
/// defined (e.g. outside the reach of a difference stencil) hold NaN.
class GridFunction {
public:
    GridFunction(GridPtr grid, std::vector<double> values);
    static GridFunction zeros(GridPtr grid);
    static GridFunction sample(GridPtr grid, const std::function<double(PointView)>& f);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Quadrature of sum_i w_i |u_i|^p over a region (no root taken).
double lp_norm_pow(const GridFunction& u, double p, Region region = Region::full);

/// (sum_i w_i |u_i|^p)^(1/p).
double lp_norm(const GridFunction& u, double p, Region region = Region::full);

}  // namespace gpsobolev
