#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rfc::oracle {

/// One period of a finite market: every node of the period branches with
/// the same one-step returns and reference probabilities.
struct Period {
    std::vector<double> returns;  ///< S_{k+1}/S_k - 1 per branch
    std::vector<double> p;        ///< reference branch probabilities
};

/// Non-recombining finite market with zero interest rate. Nodes at period k
/// are numbered 0..nodes(k)-1; child i of node j is j * branching(k) + i.
class TreeMarket {
public:
    explicit TreeMarket(std::vector<Period> periods);

    std::size_t n_periods() const noexcept { return periods_.size(); }
    const Period& period(std::size_t k) const { return periods_.at(k); }
    std::size_t branching(std::size_t k) const { return periods_.at(k).returns.size(); }
    /// Nodes at time k (1 at k = 0).
    std::size_t nodes(std::size_t k) const;
    /// Nodes at time `to` below node `node` at time `from`, as [first, last).
    std::pair<std::size_t, std::size_t> descendants(std::size_t from, std::size_t node,
                                                    std::size_t to) const;
    /// Branch taken at period k on the way to node `leaf` at time `to`.
    std::size_t branch_at(std::size_t k, std::size_t leaf, std::size_t to) const;

    nlohmann::json describe() const;

private:
    std::vector<Period> periods_;
};

/// Utility on the terminal wealth: log, power x^{1-R}/(1-R) (R > 0, R != 1)
/// or exponential -exp(-alpha x)/alpha.
class Utility {
public:
    enum class Kind { Log, Power, Exp };

    static Utility log();
    static Utility power(double R);
    static Utility exponential(double alpha);

    Kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return param_; }

    /// -infinity outside the domain of log/power.
    double value(double x) const;
    /// Convex conjugate sup_x (U(x) - x y), y > 0.
    double conjugate(double y) const;
    /// Wealth must stay positive.
    bool needs_positive_wealth() const noexcept { return kind_ != Kind::Exp; }

    std::string name() const;
    nlohmann::json describe() const;

private:
    Kind kind_ = Kind::Log;
    double param_ = 0.0;
};

/// Open interval of amounts h keeping x + h r_i > 0 for every branch.
std::pair<double, double> feasible_amounts(double x, const std::vector<double>& returns);

}  // namespace rfc::oracle
