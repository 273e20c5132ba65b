#include "stmc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "stmc/csv.hpp"

namespace stmc {

UniformGrid::UniformGrid(Box box, double h) : box_(box), h_(h) {
    if (box.dim < 1 || box.dim > kMaxDim) throw std::invalid_argument("UniformGrid: dim must be in [1,3]");
    if (!(box.half_width > 0.0)) throw std::invalid_argument("UniformGrid: box half-width must be positive");
    if (!(h > 0.0)) throw std::invalid_argument("UniformGrid: grid step must be positive");
    const double ratio = box.half_width / h;
    const long m = std::lround(ratio);
    if (m < 1 || std::fabs(ratio - static_cast<double>(m)) > 1e-9)
        throw std::invalid_argument("UniformGrid: half-width / h must be a positive integer");
    nodes_per_axis_ = static_cast<int>(2 * m + 1);
    node_count_ = 1;
    for (int a = 0; a < box.dim; ++a) node_count_ *= static_cast<std::size_t>(nodes_per_axis_);
}

double UniformGrid::cell_volume() const {
    double w = 1.0;
    for (int a = 0; a < box_.dim; ++a) w *= h_;
    return w;
}

Vec UniformGrid::node(std::size_t flat) const {
    Vec x(box_.dim);
    const std::size_t n = static_cast<std::size_t>(nodes_per_axis_);
    for (int a = box_.dim - 1; a >= 0; --a) {
        const std::size_t idx = flat % n;
        flat /= n;
        x[a] = -box_.half_width + static_cast<double>(idx) * h_;
    }
    return x;
}

bool UniformGrid::is_interior(std::size_t flat) const {
    const std::size_t n = static_cast<std::size_t>(nodes_per_axis_);
    for (int a = box_.dim - 1; a >= 0; --a) {
        const std::size_t idx = flat % n;
        flat /= n;
        if (idx == 0 || idx + 1 == n) return false;
    }
    return true;
}

std::size_t UniformGrid::neighbor(std::size_t flat, int axis, int direction) const {
    std::size_t stride = 1;
    for (int a = box_.dim - 1; a > axis; --a) stride *= static_cast<std::size_t>(nodes_per_axis_);
    return direction > 0 ? flat + stride : flat - stride;
}

GridFunction::GridFunction(UniformGrid grid) : grid_(grid), values_(grid.node_count(), 0.0) {}

GridFunction::GridFunction(UniformGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count())
        throw std::invalid_argument("GridFunction: value count does not match the grid");
}

GridFunction GridFunction::sample(const UniformGrid& grid, const ScalarMap& f) {
    GridFunction g(grid);
    for (std::size_t i = 0; i < grid.node_count(); ++i) g.values_[i] = f(grid.node(i));
    return g;
}

double GridFunction::interpolate(const Vec& x) const {
    const int d = grid_.dim();
    const double L = grid_.half_width();
    const double h = grid_.h();
    const int n = grid_.nodes_per_axis();

    int cell[kMaxDim];
    double w[kMaxDim];
    for (int a = 0; a < d; ++a) {
        double c = std::clamp(x[a], -L, L);
        double pos = (c + L) / h;
        int j = static_cast<int>(std::floor(pos));
        j = std::clamp(j, 0, n - 2);
        cell[a] = j;
        w[a] = pos - j;
    }

    double sum = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
        double weight = 1.0;
        std::size_t flat = 0;
        for (int a = 0; a < d; ++a) {
            const int hi = (corner >> a) & 1;
            weight *= hi ? w[a] : 1.0 - w[a];
            flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(cell[a] + hi);
        }
        sum += weight * values_[flat];
    }
    return sum;
}

Vec GridFunction::gradient(std::size_t flat) const {
    const int d = grid_.dim();
    Vec g(d);
    const double denom = 2.0 * grid_.h();
    for (int a = 0; a < d; ++a)
        g[a] = (values_[grid_.neighbor(flat, a, +1)] - values_[grid_.neighbor(flat, a, -1)]) / denom;
    return g;
}

double GridFunction::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

bool GridFunction::finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

void GridFunction::write_csv(std::ostream& out) const {
    const int d = grid_.dim();
    for (int a = 0; a < d; ++a) out << 'x' << a << ',';
    out << "value\n";
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const Vec x = grid_.node(i);
        std::vector<std::string> cells;
        cells.reserve(static_cast<std::size_t>(d) + 1);
        for (int a = 0; a < d; ++a) cells.push_back(csv_cell(x[a]));
        cells.push_back(csv_cell(values_[i]));
        csv_row(out, cells);
    }
}

namespace {
constexpr char kGridMagic[8] = {'S', 'T', 'M', 'C', 'G', 'R', 'D', '1'};
}

void GridFunction::write_binary(std::ostream& out) const {
    out.write(kGridMagic, sizeof(kGridMagic));
    const std::int32_t d = grid_.dim();
    const double L = grid_.half_width();
    const double h = grid_.h();
    const std::uint64_t count = values_.size();
    out.write(reinterpret_cast<const char*>(&d), sizeof(d));
    out.write(reinterpret_cast<const char*>(&L), sizeof(L));
    out.write(reinterpret_cast<const char*>(&h), sizeof(h));
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    out.write(reinterpret_cast<const char*>(values_.data()),
              static_cast<std::streamsize>(values_.size() * sizeof(double)));
}

GridFunction GridFunction::read_binary(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kGridMagic))
        throw std::invalid_argument("GridFunction: not a grid dump");
    std::int32_t d = 0;
    double L = 0.0, h = 0.0;
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&d), sizeof(d));
    in.read(reinterpret_cast<char*>(&L), sizeof(L));
    in.read(reinterpret_cast<char*>(&h), sizeof(h));
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    UniformGrid grid(Box{d, L}, h);
    if (count != grid.node_count()) throw std::invalid_argument("GridFunction: corrupt grid dump");
    std::vector<double> values(count);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::invalid_argument("GridFunction: truncated grid dump");
    return GridFunction(grid, std::move(values));
}

}  // namespace stmc
