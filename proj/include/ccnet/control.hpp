#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ccnet/random.hpp"

namespace ccnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Degree of the minimal polynomial of `a`: the smallest d for which the
/// flattened powers I, A, ..., A^d are linearly dependent. Dependence is
/// declared when the smallest singular value of the (column-normalized)
/// stack falls below tol times the largest.
int minimal_poly_degree(Matrix const& a, double tol = 1e-9);

/// Minimum-norm least-squares pseudoinverse; singular values below
/// tol * sigma_max are treated as zero.
Matrix pseudo_inverse(Matrix const& m, double tol = 1e-10);

/// True when col(B) contains col(I - A) up to a relative tolerance.
bool range_condition_holds(Matrix const& a, Matrix const& b, double tol = 1e-8);

/// Input plan that steers the noiseless estimate recursion from x_hat to
/// x_des in v steps: Psi^+ (x_des - A^v x_hat), Psi = [A^(v-1)B ... B].
/// Works for any (A, B); no range or controllability condition is assumed.
std::vector<Vector> design_inputs(Matrix const& a, Matrix const& b, int v, Vector const& x_des,
                                  Vector const& x_hat);

/// Discrete-time plant x(t+1) = A x + B u + w, with the data a controller
/// needs to steer it to x_des. Construction enforces that v is at least
/// the minimal-polynomial degree of A and that col(B) contains col(I - A).
class LtiSystem
{
  public:
    /// `horizon` = 0 selects the minimal-polynomial degree of A.
    LtiSystem(Matrix a, Matrix b, Vector x_des, int horizon = 0, double process_noise_std = 0.0,
              double tol = 1e-10);

    Matrix const& a() const noexcept { return a_; }
    Matrix const& b() const noexcept { return b_; }
    Vector const& x_des() const noexcept { return x_des_; }
    int horizon() const noexcept { return v_; }
    double process_noise_std() const noexcept { return noise_std_; }
    Eigen::Index state_dim() const noexcept { return a_.rows(); }
    Eigen::Index input_dim() const noexcept { return b_.cols(); }

    /// Plan of v inputs from the current estimate.
    std::vector<Vector> design_inputs(Vector const& x_hat) const;

    /// u_bar = B^+ (I - A) x_des; holds x_des fixed in the absence of noise.
    Vector const& holding_input() const noexcept { return holding_; }

    /// B^+ (I - A) x; leaves x unchanged in the absence of noise.
    Vector feedback_input(Vector const& x) const;

    /// A x + B u + w with w ~ N(0, sigma^2 I).
    Vector propagate(Vector const& x, Vector const& u, Engine& rng) const;

    /// A x_hat + S B u_sent.
    Vector update_estimate(Vector const& x_hat, Vector const& u_sent, bool success) const;

  private:
    Matrix a_;
    Matrix b_;
    Vector x_des_;
    int v_ = 1;
    double noise_std_ = 0.0;
    Matrix a_pow_v_;
    Matrix psi_pinv_;
    Matrix feedback_gain_;
    Vector holding_;
};

/// Four-state plant with distinct eigenvalues (fewer states when v < 4),
/// B = I and x_des = 1. Used when a configuration names no plant.
LtiSystem default_plant(int horizon, double process_noise_std = 0.0);

/// Marker values in BlockTrace::sent_index.
inline constexpr int kIdleSlot = -1;
inline constexpr int kDummySlot = -2;

/// Slot-by-slot record of one block.
struct BlockTrace
{
    std::vector<std::uint8_t> access;   ///< C0(t)
    std::vector<std::uint8_t> acks;     ///< S(t)
    std::vector<Vector> states;         ///< x(t), T + 1 entries
    std::vector<Vector> estimates;      ///< x_hat(t), T + 1 entries
    std::vector<Vector> inputs_applied; ///< u(t) at the actuator
    std::vector<int> sent_index;        ///< plan index transmitted, kIdleSlot or kDummySlot
    int burst_final = 0;                ///< L (restless) or min(Lambda, v) (rested) at block end
    int success_count = 0;              ///< sum of acks
    int redesign_count = 0;             ///< number of plans computed
    int controllable_slot = -1;         ///< first slot after which the block counts as controllable
    bool block_controllable = false;
};

/// Returns S(t) for a slot in which the typical controller transmits.
using SuccessOracle = std::function<bool(int slot)>;

/// Restless loop: failed slots apply zero input; a run of v successes
/// delivers the plan, after which the actuator holds with u_bar.
BlockTrace run_block_restless(LtiSystem const& sys, int slots, std::span<std::uint8_t const> access,
                              SuccessOracle const& oracle, Vector const& x_true, Vector const& x_hat, Engine& rng);

/// Rested loop: failed slots apply local feedback B^+ (I - A) x, freezing
/// the estimate; the plan index advances only on success.
BlockTrace run_block_rested(LtiSystem const& sys, int slots, std::span<std::uint8_t const> access,
                            SuccessOracle const& oracle, Vector const& x_true, Vector const& x_hat, Engine& rng);

/// At least v consecutive ones.
bool is_block_controllable_restless(std::span<std::uint8_t const> acks, int v);

/// At least v ones in total.
bool is_block_controllable_rested(std::span<std::uint8_t const> acks, int v);

}  // namespace ccnet
