#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "stmc/linalg.hpp"

// Uniform node-centered grids on the symmetric box [-L, L]^d and scalar
// fields sampled on them.  L/h must be integral so nodes land exactly on
// -L, 0 and L; nodes are ordered row-major with axis 0 slowest.

namespace stmc {

struct Box {
    int dim = 1;
    double half_width = 1.0;
};

using ScalarMap = std::function<double(const Vec&)>;

class UniformGrid {
public:
    UniformGrid(Box box, double h);

    int dim() const { return box_.dim; }
    double half_width() const { return box_.half_width; }
    const Box& box() const { return box_; }
    double h() const { return h_; }
    int nodes_per_axis() const { return nodes_per_axis_; }
    std::size_t node_count() const { return node_count_; }
    double cell_volume() const;  // h^d, the midpoint-rule weight

    Vec node(std::size_t flat) const;
    bool is_interior(std::size_t flat) const;

    // Flat index displaced by +-1 along one axis; caller ensures interiority.
    std::size_t neighbor(std::size_t flat, int axis, int direction) const;

    bool operator==(const UniformGrid& o) const {
        return box_.dim == o.box_.dim && box_.half_width == o.box_.half_width && h_ == o.h_;
    }

private:
    Box box_;
    double h_;
    int nodes_per_axis_;
    std::size_t node_count_;
};

class GridFunction {
public:
    explicit GridFunction(UniformGrid grid);
    GridFunction(UniformGrid grid, std::vector<double> values);

    static GridFunction sample(const UniformGrid& grid, const ScalarMap& f);

    const UniformGrid& grid() const { return grid_; }
    double value(std::size_t flat) const { return values_[flat]; }
    double& value(std::size_t flat) { return values_[flat]; }
    const std::vector<double>& values() const { return values_; }

    // Multilinear interpolation; coordinates are clamped to the box.
    double interpolate(const Vec& x) const;

    // Central-difference gradient at an interior node.
    Vec gradient(std::size_t flat) const;

    double min_value() const;
    double max_value() const;
    bool finite() const;

    void write_csv(std::ostream& out) const;
    void write_binary(std::ostream& out) const;
    static GridFunction read_binary(std::istream& in);

private:
    UniformGrid grid_;
    std::vector<double> values_;
};

}  // namespace stmc
