#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stmc/brownian.hpp"
#include "stmc/drift.hpp"
#include "stmc/linalg.hpp"

// Stochastic characteristics along a fixed Brownian path.
//
// Forward map X_{s,t}(x): Euler-Maruyama on the path grid,
//   X_{k+1} = X_k + b(X_k) dt + dB_k,
// which for additive noise carries no Ito/Stratonovich correction.  The
// backward map Y_{s,t}(x) starts from x at time t and steps down to s,
// consuming the same increments in reverse with negated sign.  Requested
// Jacobians evolve by the variational update J <- (I +- Db dt) J alongside
// the state, with Db from Drift::jacobian.
//
// Restarting the forward map at an intermediate grid time replays the exact
// same arithmetic, so the two-parameter composition property holds bitwise.

namespace stmc {

class FlowDivergence : public std::runtime_error {
public:
    FlowDivergence(int step, const std::string& what_happened)
        : std::runtime_error("flow diverged at step " + std::to_string(step) + ": " + what_happened),
          step_(step),
          reason_(what_happened) {}
    int step() const { return step_; }
    const std::string& reason() const { return reason_; }

    // Monte Carlo loops tag the offending path before rethrowing; -1 until set.
    int path_index() const { return path_index_; }
    void set_path_index(int k) { path_index_ = k; }

private:
    int step_;
    std::string reason_;
    int path_index_ = -1;
};

struct FlowOptions {
    bool want_jacobian = false;
    double jacobian_fd_step = 0.0;   // 0: the drift's default step
    double excursion_guard = 1e6;    // abort when |X| exceeds this
    bool record_trajectory = false;  // keep every visited state
};

struct FlowResult {
    double s = 0.0;
    double t = 0.0;
    Vec start;
    Vec terminal;
    Mat jacobian;          // identity when not requested
    double jacobian_det = 1.0;
    std::vector<Vec> trajectory;  // filled when record_trajectory is set
};

// X_{s,t}(x) for grid times s <= t.
FlowResult forward_flow(const Drift& b, const BrownianPath& path, double s, double t,
                        const Vec& x, const FlowOptions& options = {});

// Y_{s,t}(x) for grid times s <= t; inverts the forward map up to O(dt).
FlowResult backward_flow(const Drift& b, const BrownianPath& path, double s, double t,
                         const Vec& x, const FlowOptions& options = {});

// max over the points of |X_{0,t}(Y_{0,t}(x)) - x| on one path.
double inverse_check(const Drift& b, const BrownianPath& path, double t,
                     std::span<const Vec> points, const FlowOptions& options = {});

// Runs fn(), tagging an escaping FlowDivergence with the Monte Carlo path
// index before it propagates.
template <typename Fn>
auto with_path_index(int k, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (FlowDivergence& e) {
        if (e.path_index() < 0) e.set_path_index(k);
        throw;
    }
}

}  // namespace stmc
