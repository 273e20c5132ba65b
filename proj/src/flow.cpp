#include "stmc/flow.hpp"

#include <cmath>

namespace stmc {

namespace {

void check_state(const Vec& x, double guard, int step) {
    // A NaN coordinate fails the comparison too, so one test covers both.
    if (!(x.norm_sq() <= guard * guard))
        throw FlowDivergence(step, x.finite() ? "state passed the excursion guard |X| > " + std::to_string(guard)
                                              : "state is not finite");
}

void validate(const Drift& b, const BrownianPath& path, const Vec& x) {
    if (b.dim() != path.dim) throw std::invalid_argument("flow: drift and path dimension mismatch");
    if (x.dim() != path.dim) throw std::invalid_argument("flow: start point dimension mismatch");
}

}  // namespace

FlowResult forward_flow(const Drift& b, const BrownianPath& path, double s, double t,
                        const Vec& x, const FlowOptions& options) {
    validate(b, path, x);
    const int is = path.index_of_time(s);
    const int it = path.index_of_time(t);
    if (is > it) throw std::invalid_argument("forward_flow: needs s <= t");

    const double dt = path.dt();
    FlowResult res;
    res.s = s;
    res.t = t;
    res.start = x;
    res.jacobian = Mat::identity(path.dim);

    Vec state = x;
    Mat jac = res.jacobian;
    if (options.record_trajectory) res.trajectory.push_back(state);
    check_state(state, options.excursion_guard, is);

    for (int k = is; k < it; ++k) {
        const Vec vel = b.eval(state);
        if (options.want_jacobian) {
            const Mat db = b.jacobian(state, options.jacobian_fd_step);
            jac = (Mat::identity(path.dim) + dt * db) * jac;
        }
        state += dt * vel;
        state += path.increment_vec(k);
        check_state(state, options.excursion_guard, k + 1);
        if (options.record_trajectory) res.trajectory.push_back(state);
    }

    res.terminal = state;
    res.jacobian = jac;
    res.jacobian_det = jac.det();
    return res;
}

FlowResult backward_flow(const Drift& b, const BrownianPath& path, double s, double t,
                         const Vec& x, const FlowOptions& options) {
    validate(b, path, x);
    const int is = path.index_of_time(s);
    const int it = path.index_of_time(t);
    if (is > it) throw std::invalid_argument("backward_flow: needs s <= t");

    const double dt = path.dt();
    FlowResult res;
    res.s = s;
    res.t = t;
    res.start = x;
    res.jacobian = Mat::identity(path.dim);

    Vec state = x;
    Mat jac = res.jacobian;
    if (options.record_trajectory) res.trajectory.push_back(state);
    check_state(state, options.excursion_guard, it);

    for (int k = it - 1; k >= is; --k) {
        const Vec vel = b.eval(state);
        if (options.want_jacobian) {
            const Mat db = b.jacobian(state, options.jacobian_fd_step);
            jac = (Mat::identity(path.dim) - dt * db) * jac;
        }
        state -= dt * vel;
        state -= path.increment_vec(k);
        check_state(state, options.excursion_guard, k);
        if (options.record_trajectory) res.trajectory.push_back(state);
    }

    res.terminal = state;
    res.jacobian = jac;
    res.jacobian_det = jac.det();
    return res;
}

double inverse_check(const Drift& b, const BrownianPath& path, double t,
                     std::span<const Vec> points, const FlowOptions& options) {
    double worst = 0.0;
    for (const Vec& x : points) {
        const Vec y = backward_flow(b, path, 0.0, t, x, options).terminal;
        const Vec z = forward_flow(b, path, 0.0, t, y, options).terminal;
        worst = std::max(worst, (z - x).norm());
    }
    return worst;
}

}  // namespace stmc
