#include "gpsobolev/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gpsobolev/errors.hpp"

namespace gpsobolev {

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    for (int e : entries_) {
        if (e < 0) throw ConfigError("multi-index entries must be non-negative");
    }
}

MultiIndex::MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

MultiIndex MultiIndex::zero(std::size_t dim) { return MultiIndex(std::vector<int>(dim, 0)); }

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t axis, int count) {
    std::vector<int> e(dim, 0);
    e.at(axis) = count;
    return MultiIndex(std::move(e));
}

int MultiIndex::order() const {
    int s = 0;
    for (int e : entries_) s += e;
    return s;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    if (other.dim() != dim()) throw ConfigError("multi-index dimension mismatch");
    std::vector<int> e(entries_);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.entries_[i];
    return MultiIndex(std::move(e));
}

std::string MultiIndex::to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(entries_[i]);
    }
    return s + ")";
}

MultiIndex MultiIndex::parse(const std::string& text) {
    if (text.size() < 2 || text.front() != '(' || text.back() != ')') {
        throw ConfigError("malformed multi-index '" + text + "'");
    }
    std::vector<int> e;
    std::stringstream ss(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            e.push_back(std::stoi(item, &used));
            if (used != item.size()) throw ConfigError("");
        } catch (const std::exception&) {
            throw ConfigError("malformed multi-index '" + text + "'");
        }
    }
    return MultiIndex(std::move(e));
}

std::vector<MultiIndex> enumerate_multi_indices(std::size_t dim, int max_order) {
    if (dim < 1) throw ConfigError("dimension must be at least 1");
    if (max_order < 0) throw ConfigError("order must be non-negative");
    std::vector<MultiIndex> out;
    std::vector<int> cur(dim, 0);
    // Odometer over [0, m]^d with the last axis fastest gives lexicographic order.
    while (true) {
        int s = 0;
        for (int c : cur) s += c;
        if (s <= max_order) out.emplace_back(cur);
        std::size_t axis = dim;
        while (axis > 0) {
            --axis;
            if (cur[axis] < max_order) {
                ++cur[axis];
                std::fill(cur.begin() + static_cast<long>(axis) + 1, cur.end(), 0);
                break;
            }
            if (axis == 0) return out;
        }
    }
}

// ---------------------------------------------------------------------------
// Box

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size() || lower_.empty()) {
        throw ConfigError("box bounds must be non-empty and of equal length");
    }
    if (lower_.size() > kMaxDimension) throw ConfigError("box dimension exceeds 3");
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (!(lower_[i] < upper_[i]) || !std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) {
            throw ConfigError("box requires finite lower[i] < upper[i]");
        }
    }
}

Box Box::unit(std::size_t dim) { return Box(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)); }

double Box::min_edge() const {
    double e = edge(0);
    for (std::size_t i = 1; i < dim(); ++i) e = std::min(e, edge(i));
    return e;
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= edge(i);
    return v;
}

bool Box::contains(PointView x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double slack = 1e-12 * std::max(1.0, std::abs(edge(i)));
        if (x[i] < lower_[i] - slack || x[i] > upper_[i] + slack) return false;
    }
    return true;
}

std::string to_string(QuadratureRule rule) {
    return rule == QuadratureRule::midpoint ? "midpoint" : "gauss_legendre";
}

QuadratureRule parse_quadrature_rule(const std::string& name) {
    if (name == "midpoint") return QuadratureRule::midpoint;
    if (name == "gauss_legendre") return QuadratureRule::gauss_legendre;
    throw ConfigError("unknown quadrature rule '" + name + "'");
}

// ---------------------------------------------------------------------------
// Quadrature

void gauss_legendre_rule(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Refresh the derivative at the converged root.
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(Box box, std::size_t nodes_per_dim, QuadratureRule rule, double margin)
    : box_(std::move(box)), n_(nodes_per_dim), rule_(rule), margin_(margin) {
    if (n_ < 2) throw ConfigError("grid needs at least 2 nodes per dimension");
    if (!(margin_ >= 0.0) || !(margin_ < 0.5 * box_.min_edge())) {
        throw ConfigError("grid margin must lie in [0, half the smallest box edge)");
    }
    const std::size_t d = box_.dim();

    std::vector<double> ref_nodes(n_), ref_weights(n_);
    if (rule_ == QuadratureRule::midpoint) {
        for (std::size_t i = 0; i < n_; ++i) {
            ref_nodes[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n_);
            ref_weights[i] = 1.0 / static_cast<double>(n_);
        }
    } else {
        gauss_legendre_rule(n_, ref_nodes, ref_weights);
        for (std::size_t i = 0; i < n_; ++i) {
            ref_nodes[i] = 0.5 * (ref_nodes[i] + 1.0);
            ref_weights[i] *= 0.5;
        }
    }

    axis_nodes_.resize(d);
    std::vector<std::vector<double>> axis_weights(d);
    for (std::size_t a = 0; a < d; ++a) {
        axis_nodes_[a].resize(n_);
        axis_weights[a].resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            axis_nodes_[a][i] = box_.lower()[a] + box_.edge(a) * ref_nodes[i];
            axis_weights[a][i] = box_.edge(a) * ref_weights[i];
        }
    }

    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) total *= n_;
    coords_.resize(total * d);
    weights_.resize(total);
    interior_mask_.assign(total, 0);
    all_nodes_.resize(total);

    for (std::size_t flat = 0; flat < total; ++flat) {
        all_nodes_[flat] = flat;
        std::size_t rem = flat;
        double w = 1.0;
        bool inside = true;
        for (std::size_t a = d; a-- > 0;) {
            const std::size_t idx = rem % n_;
            rem /= n_;
            const double x = axis_nodes_[a][idx];
            coords_[flat * d + a] = x;
            w *= axis_weights[a][idx];
            const double slack = 1e-12 * box_.edge(a);
            if (x < box_.lower()[a] + margin_ - slack || x > box_.upper()[a] - margin_ + slack) inside = false;
        }
        weights_[flat] = w;
        if (inside) {
            interior_mask_[flat] = 1;
            interior_nodes_.push_back(flat);
        }
    }
}

double Grid::max_spacing() const {
    double h = spacing(0);
    for (std::size_t a = 1; a < dim(); ++a) h = std::max(h, spacing(a));
    return h;
}

std::vector<std::size_t> Grid::lattice(std::size_t i) const {
    std::vector<std::size_t> out(dim());
    for (std::size_t a = dim(); a-- > 0;) {
        out[a] = i % n_;
        i /= n_;
    }
    return out;
}

std::size_t Grid::flat_index(std::span<const std::size_t> lattice) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < dim(); ++a) flat = flat * n_ + lattice[a];
    return flat;
}

std::optional<std::size_t> Grid::shifted(std::size_t i, std::size_t axis, long offset) const {
    std::size_t stride = 1;
    for (std::size_t a = dim(); a-- > axis + 1;) stride *= n_;
    const long coord = static_cast<long>((i / stride) % n_);
    const long target = coord + offset;
    if (target < 0 || target >= static_cast<long>(n_)) return std::nullopt;
    return static_cast<std::size_t>(static_cast<long>(i) + offset * static_cast<long>(stride));
}

std::span<const std::size_t> Grid::nodes_in(Region region) const {
    return region == Region::full ? std::span<const std::size_t>(all_nodes_)
                                  : std::span<const std::size_t>(interior_nodes_);
}

double Grid::measure(Region region) const {
    double s = 0.0;
    for (std::size_t i : nodes_in(region)) s += weights_[i];
    return s;
}

GridPtr build_grid(const Box& box, std::size_t n, QuadratureRule rule, std::optional<double> margin) {
    if (n < 2) throw ConfigError("grid needs at least 2 nodes per dimension (got " + std::to_string(n) + ")");
    double m = 0.0;
    if (margin) {
        m = *margin;
    } else {
        double h = 0.0;
        for (std::size_t a = 0; a < box.dim(); ++a) h = std::max(h, box.edge(a) / static_cast<double>(n));
        m = 2.0 * h;
        // very coarse grids: fall back to the largest whole number of spacings that fits
        const double half = 0.5 * box.min_edge();
        if (m >= half) m = h * std::max(0.0, std::ceil(half / h) - 1.0);
    }
    return std::make_shared<const Grid>(box, n, rule, m);
}

// ---------------------------------------------------------------------------
// GridFunction

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw ConfigError("grid function requires a grid");
    if (values_.size() != grid_->size()) throw ConfigError("grid function size does not match grid");
}

GridFunction GridFunction::zeros(GridPtr grid) {
    const std::size_t n = grid->size();
    return GridFunction(std::move(grid), std::vector<double>(n, 0.0));
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(PointView)>& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
    return GridFunction(std::move(grid), std::move(v));
}

double lp_norm_pow(const GridFunction& u, double p, Region region) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("L^p exponent must be finite and >= 1");
    const Grid& g = u.grid();
    double s = 0.0;
    for (std::size_t i : g.nodes_in(region)) {
        const double a = std::abs(u[i]);
        if (a == 0.0) continue;
        s += g.weight(i) * (p == 2.0 ? a * a : std::pow(a, p));
    }
    return s;
}

double lp_norm(const GridFunction& u, double p, Region region) {
    return std::pow(lp_norm_pow(u, p, region), 1.0 / p);
}

}  // namespace gpsobolev
