#include "ccnet/control.hpp"

#include <algorithm>

#include "ccnet/errors.hpp"

namespace ccnet {
namespace {

Matrix controllability_stack(Matrix const& a, Matrix const& b, int v)
{
    Eigen::Index const n = a.rows();
    Eigen::Index const m = b.cols();
    Matrix psi(n, m * v);
    Matrix block = b;
    // Psi = [A^(v-1) B, ..., A B, B]; fill from the right.
    for (int k = v - 1; k >= 0; --k) {
        psi.middleCols(k * m, m) = block;
        block = a * block;
    }
    return psi;
}

std::vector<Vector> split_plan(Vector const& stacked, Eigen::Index m, int v)
{
    std::vector<Vector> plan;
    plan.reserve(static_cast<std::size_t>(v));
    for (int k = 0; k < v; ++k) {
        plan.emplace_back(stacked.segment(k * m, m));
    }
    return plan;
}

void check_square(Matrix const& a, char const* who)
{
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw InvalidArgument(std::string(who) + ": A must be square and non-empty");
    }
}

}  // namespace

int minimal_poly_degree(Matrix const& a, double tol)
{
    check_square(a, "minimal_poly_degree");
    if (!(tol > 0.0)) {
        throw InvalidArgument("minimal_poly_degree: tol must be > 0");
    }
    Eigen::Index const n = a.rows();
    Matrix stack(n * n, n + 1);
    Matrix power = Matrix::Identity(n, n);
    for (Eigen::Index d = 0; d <= n; ++d) {
        Eigen::Map<Vector const> flat(power.data(), n * n);
        double const norm = flat.norm();
        if (norm == 0.0) {
            // A^d = 0: the powers up to d are already dependent.
            return static_cast<int>(d);
        }
        stack.col(d) = flat / norm;
        if (d >= 1) {
            Eigen::JacobiSVD<Matrix> svd(stack.leftCols(d + 1));
            auto const& sv = svd.singularValues();
            if (sv(sv.size() - 1) < tol * sv(0)) {
                return static_cast<int>(d);
            }
        }
        power = power * a;
    }
    return static_cast<int>(n);
}

Matrix pseudo_inverse(Matrix const& m, double tol)
{
    if (m.size() == 0) {
        return Matrix::Zero(m.cols(), m.rows());
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    auto const& sv = svd.singularValues();
    double const cutoff = tol * (sv.size() > 0 ? sv(0) : 0.0);
    Vector inv = Vector::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff && sv(i) > 0.0) {
            inv(i) = 1.0 / sv(i);
        }
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

bool range_condition_holds(Matrix const& a, Matrix const& b, double tol)
{
    check_square(a, "range_condition_holds");
    Eigen::Index const n = a.rows();
    Matrix const gap = Matrix::Identity(n, n) - a;
    Matrix const projector = b * pseudo_inverse(b);
    Matrix const residual = gap - projector * gap;
    return residual.norm() <= tol * std::max(1.0, gap.norm());
}

std::vector<Vector> design_inputs(Matrix const& a, Matrix const& b, int v, Vector const& x_des,
                                  Vector const& x_hat)
{
    check_square(a, "design_inputs");
    if (v < 1) {
        throw InvalidArgument("design_inputs: v must be >= 1");
    }
    if (b.rows() != a.rows() || x_des.size() != a.rows() || x_hat.size() != a.rows()) {
        throw InvalidArgument("design_inputs: dimension mismatch");
    }
    Matrix a_pow = Matrix::Identity(a.rows(), a.cols());
    for (int k = 0; k < v; ++k) {
        a_pow = a_pow * a;
    }
    Matrix const psi = controllability_stack(a, b, v);
    Vector const stacked = pseudo_inverse(psi) * (x_des - a_pow * x_hat);
    return split_plan(stacked, b.cols(), v);
}

LtiSystem::LtiSystem(Matrix a, Matrix b, Vector x_des, int horizon, double process_noise_std, double tol)
    : a_(std::move(a)), b_(std::move(b)), x_des_(std::move(x_des)), noise_std_(process_noise_std)
{
    check_square(a_, "LtiSystem");
    Eigen::Index const n = a_.rows();
    if (b_.rows() != n || b_.cols() == 0) {
        throw InvalidArgument("LtiSystem: B must have as many rows as A and at least one column");
    }
    if (x_des_.size() != n) {
        throw InvalidArgument("LtiSystem: x_des must have as many entries as A has rows");
    }
    if (!(process_noise_std >= 0.0)) {
        throw InvalidArgument("LtiSystem: process_noise_std must be >= 0");
    }
    int const degree = minimal_poly_degree(a_);
    if (horizon == 0) {
        v_ = degree;
    } else if (horizon < degree) {
        throw InvalidArgument("LtiSystem: horizon v = " + std::to_string(horizon)
                              + " is below the minimal-polynomial degree " + std::to_string(degree));
    } else {
        v_ = horizon;
    }
    if (!range_condition_holds(a_, b_)) {
        throw InvalidArgument("LtiSystem: column space of B does not contain column space of I - A");
    }

    a_pow_v_ = Matrix::Identity(n, n);
    for (int k = 0; k < v_; ++k) {
        a_pow_v_ = a_pow_v_ * a_;
    }
    psi_pinv_ = pseudo_inverse(controllability_stack(a_, b_, v_), tol);
    feedback_gain_ = pseudo_inverse(b_, tol) * (Matrix::Identity(n, n) - a_);
    holding_ = feedback_gain_ * x_des_;
}

std::vector<Vector> LtiSystem::design_inputs(Vector const& x_hat) const
{
    Vector const stacked = psi_pinv_ * (x_des_ - a_pow_v_ * x_hat);
    return split_plan(stacked, input_dim(), v_);
}

Vector LtiSystem::feedback_input(Vector const& x) const { return feedback_gain_ * x; }

Vector LtiSystem::propagate(Vector const& x, Vector const& u, Engine& rng) const
{
    Vector next = a_ * x + b_ * u;
    if (noise_std_ > 0.0) {
        std::normal_distribution<double> noise(0.0, noise_std_);
        for (Eigen::Index i = 0; i < next.size(); ++i) {
            next(i) += noise(rng);
        }
    }
    return next;
}

Vector LtiSystem::update_estimate(Vector const& x_hat, Vector const& u_sent, bool success) const
{
    Vector next = a_ * x_hat;
    if (success) {
        next += b_ * u_sent;
    }
    return next;
}

LtiSystem default_plant(int horizon, double process_noise_std)
{
    static constexpr double kEigenvalues[] = {0.9, 1.1, 0.8, 1.2};
    int const n = std::clamp(horizon, 1, 4);
    Vector diag(n);
    for (int i = 0; i < n; ++i) {
        diag(i) = kEigenvalues[i];
    }
    return LtiSystem(diag.asDiagonal(), Matrix::Identity(n, n), Vector::Ones(n), horizon, process_noise_std);
}

namespace {

void check_block_inputs(LtiSystem const& sys, int slots, std::span<std::uint8_t const> access,
                        Vector const& x_true, Vector const& x_hat)
{
    if (slots < 1) {
        throw InvalidArgument("run_block: T must be >= 1");
    }
    if (access.size() != static_cast<std::size_t>(slots)) {
        throw InvalidArgument("run_block: access sequence must have T entries");
    }
    if (x_true.size() != sys.state_dim() || x_hat.size() != sys.state_dim()) {
        throw InvalidArgument("run_block: state dimension mismatch");
    }
}

BlockTrace start_trace(int slots, Vector const& x_true, Vector const& x_hat)
{
    BlockTrace tr;
    auto const n = static_cast<std::size_t>(slots);
    tr.access.reserve(n);
    tr.acks.reserve(n);
    tr.states.reserve(n + 1);
    tr.estimates.reserve(n + 1);
    tr.inputs_applied.reserve(n);
    tr.sent_index.reserve(n);
    tr.states.push_back(x_true);
    tr.estimates.push_back(x_hat);
    return tr;
}

}  // namespace

BlockTrace run_block_restless(LtiSystem const& sys, int slots, std::span<std::uint8_t const> access,
                              SuccessOracle const& oracle, Vector const& x_true, Vector const& x_hat, Engine& rng)
{
    check_block_inputs(sys, slots, access, x_true, x_hat);
    int const v = sys.horizon();
    Eigen::Index const m = sys.input_dim();
    Vector const zero = Vector::Zero(m);
    Vector const dummy = Vector::Ones(m);

    BlockTrace tr = start_trace(slots, x_true, x_hat);
    Vector x = x_true;
    Vector xh = x_hat;
    std::vector<Vector> plan;
    int burst = 0;
    bool holding = false;

    for (int t = 0; t < slots; ++t) {
        bool const active = access[static_cast<std::size_t>(t)] != 0;
        bool success = false;
        int sent = kIdleSlot;
        Vector const* u_sent = &zero;
        if (active) {
            if (burst == 0) {
                plan = sys.design_inputs(xh);
                ++tr.redesign_count;
            }
            if (burst == v) {
                u_sent = &dummy;
                sent = kDummySlot;
            } else {
                u_sent = &plan[static_cast<std::size_t>(burst)];
                sent = burst;
            }
            success = oracle(t);
            if (burst < v) {
                burst = success ? burst + 1 : 0;
            }
        } else if (burst < v) {
            // S(t) = 0 when idle; the pending plan assumed consecutive delivery.
            burst = 0;
        }

        Vector u = holding ? sys.holding_input() : (success ? *u_sent : zero);
        xh = holding ? sys.update_estimate(xh, u, true) : sys.update_estimate(xh, *u_sent, success);
        x = sys.propagate(x, u, rng);

        tr.access.push_back(active ? 1 : 0);
        tr.acks.push_back(success ? 1 : 0);
        tr.sent_index.push_back(sent);
        tr.inputs_applied.push_back(std::move(u));
        tr.states.push_back(x);
        tr.estimates.push_back(xh);
        tr.success_count += success ? 1 : 0;

        if (!holding && burst == v) {
            holding = true;
            tr.controllable_slot = t;
        }
    }
    tr.burst_final = burst;
    tr.block_controllable = is_block_controllable_restless(tr.acks, v);
    return tr;
}

BlockTrace run_block_rested(LtiSystem const& sys, int slots, std::span<std::uint8_t const> access,
                            SuccessOracle const& oracle, Vector const& x_true, Vector const& x_hat, Engine& rng)
{
    check_block_inputs(sys, slots, access, x_true, x_hat);
    int const v = sys.horizon();

    BlockTrace tr = start_trace(slots, x_true, x_hat);
    Vector x = x_true;
    Vector xh = x_hat;
    std::vector<Vector> const plan = sys.design_inputs(xh);
    tr.redesign_count = 1;
    int delivered = 0;

    for (int t = 0; t < slots; ++t) {
        bool const active = access[static_cast<std::size_t>(t)] != 0;
        bool success = false;
        int sent = kIdleSlot;
        bool apply_plan = false;
        if (active && delivered < v) {
            sent = delivered;
            success = oracle(t);
            apply_plan = success;
        } else if (active) {
            sent = kDummySlot;
            success = oracle(t);
        }

        Vector u;
        if (apply_plan) {
            u = plan[static_cast<std::size_t>(delivered)];
            xh = sys.update_estimate(xh, u, true);
            ++delivered;
        } else {
            u = sys.feedback_input(x);
        }
        x = sys.propagate(x, u, rng);

        tr.access.push_back(active ? 1 : 0);
        tr.acks.push_back(success ? 1 : 0);
        tr.sent_index.push_back(sent);
        tr.inputs_applied.push_back(std::move(u));
        tr.states.push_back(x);
        tr.estimates.push_back(xh);
        tr.success_count += success ? 1 : 0;
        if (apply_plan && delivered == v) {
            tr.controllable_slot = t;
        }
    }
    tr.burst_final = delivered;
    tr.block_controllable = is_block_controllable_rested(tr.acks, v);
    return tr;
}

bool is_block_controllable_restless(std::span<std::uint8_t const> acks, int v)
{
    if (v < 1) {
        throw InvalidArgument("is_block_controllable_restless: v must be >= 1");
    }
    int run = 0;
    for (auto s : acks) {
        run = s ? run + 1 : 0;
        if (run >= v) {
            return true;
        }
    }
    return false;
}

bool is_block_controllable_rested(std::span<std::uint8_t const> acks, int v)
{
    if (v < 1) {
        throw InvalidArgument("is_block_controllable_rested: v must be >= 1");
    }
    int total = 0;
    for (auto s : acks) {
        total += s ? 1 : 0;
    }
    return total >= v;
}

}  // namespace ccnet
