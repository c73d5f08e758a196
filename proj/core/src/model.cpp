#include "sysmdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace sysmdp {

InfeasiblePolicy::InfeasiblePolicy(std::size_t state, int action)
    : Error("action " + std::to_string(action) + " is not feasible in state " +
            std::to_string(state)),
      state_(state),
      action_(action) {}

bool MdpModel::feasible(std::size_t state, int action) const {
    if (state >= actions.size()) return false;
    const auto& a = actions[state];
    return std::find(a.begin(), a.end(), action) != a.end();
}

std::vector<Violation> validate_model(const MdpModel& model, double row_tolerance) {
    std::vector<Violation> out;
    const auto n = model.n_states;
    const auto nn = static_cast<Eigen::Index>(n);

    if (n == 0) out.push_back({"model has no states", {}, {}});
    if (model.actions.size() != n) {
        out.push_back({"actions lists " + std::to_string(model.actions.size()) +
                           " states, expected " + std::to_string(n),
                       {}, {}});
    }
    if (model.costs.size() != model.transitions.size()) {
        out.push_back({"number of cost vectors differs from number of transition matrices",
                       {}, {}});
    }

    for (std::size_t x = 0; x < model.actions.size(); ++x) {
        if (model.actions[x].empty()) {
            out.push_back({"state has no feasible action", x, {}});
        }
        for (int a : model.actions[x]) {
            if (a < 0 || static_cast<std::size_t>(a) >= model.transitions.size() ||
                static_cast<std::size_t>(a) >= model.costs.size()) {
                out.push_back({"feasible action does not address a transition matrix and cost vector",
                               x, a});
            }
        }
    }

    for (std::size_t ai = 0; ai < model.transitions.size(); ++ai) {
        const int a = static_cast<int>(ai);
        const Matrix& p = model.transitions[ai];
        if (p.rows() != nn || p.cols() != nn) {
            out.push_back({"transition matrix is not " + std::to_string(n) + "x" +
                               std::to_string(n),
                           {}, a});
            continue;
        }
        for (Eigen::Index i = 0; i < nn; ++i) {
            const auto x = static_cast<std::size_t>(i);
            bool negative = false;
            bool finite = true;
            for (Eigen::Index j = 0; j < nn; ++j) {
                if (!std::isfinite(p(i, j))) finite = false;
                if (p(i, j) < 0.0) negative = true;
            }
            if (!finite) {
                out.push_back({"row has non-finite entries", x, a});
                continue;
            }
            if (negative) out.push_back({"row has negative entries", x, a});
            const double sum = p.row(i).sum();
            if (std::abs(sum - 1.0) > row_tolerance) {
                std::ostringstream msg;
                msg.precision(12);
                msg << "row sum " << sum << " != 1";
                out.push_back({msg.str(), x, a});
            }
        }
    }

    for (std::size_t ai = 0; ai < model.costs.size(); ++ai) {
        const int a = static_cast<int>(ai);
        const Vector& c = model.costs[ai];
        if (c.size() != nn) {
            out.push_back({"cost vector length " + std::to_string(c.size()) + " != " +
                               std::to_string(n),
                           {}, a});
            continue;
        }
        for (Eigen::Index i = 0; i < nn; ++i) {
            if (!std::isfinite(c(i))) {
                out.push_back({"cost is not finite", static_cast<std::size_t>(i), a});
            }
        }
    }
    return out;
}

std::string to_string(const Policy& policy) {
    std::string s = "[";
    for (std::size_t i = 0; i < policy.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(policy[i]);
    }
    return s + "]";
}

void check_feasible(const MdpModel& model, const Policy& policy) {
    if (policy.size() != model.n_states) {
        throw Error("policy has " + std::to_string(policy.size()) + " entries, model has " +
                    std::to_string(model.n_states) + " states");
    }
    for (std::size_t x = 0; x < model.n_states; ++x) {
        if (!model.feasible(x, policy[x])) throw InfeasiblePolicy(x, policy[x]);
    }
}

PolicyModel apply_policy(const MdpModel& model, const Policy& policy) {
    check_feasible(model, policy);
    const auto n = static_cast<Eigen::Index>(model.n_states);
    PolicyModel pm{Matrix(n, n), Vector(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto a = static_cast<std::size_t>(policy[static_cast<std::size_t>(i)]);
        pm.transition.row(i) = model.transitions[a].row(i);
        pm.cost(i) = model.costs[a](i);
    }
    return pm;
}

Policy first_feasible_policy(const MdpModel& model) {
    Policy p;
    p.actions.reserve(model.n_states);
    for (const auto& a : model.actions) {
        if (a.empty()) throw Error("state without feasible actions");
        p.actions.push_back(a.front());
    }
    return p;
}

PolicySpace::PolicySpace(const MdpModel& model, std::uint64_t cap) : actions_(model.actions) {
    // Accumulate in long double so an overflowing product is still reported.
    long double product = 1.0L;
    for (const auto& a : actions_) {
        if (a.empty()) throw Error("state without feasible actions");
        product *= static_cast<long double>(a.size());
    }
    if (product > static_cast<long double>(cap)) {
        std::ostringstream msg;
        msg << "policy space has " << std::fixed << std::setprecision(0) << product
            << " policies, exceeding the cap of " << cap;
        throw Error(msg.str());
    }
    count_ = static_cast<std::uint64_t>(product);
}

PolicySpace::iterator::iterator(const std::vector<std::vector<int>>* actions,
                                std::uint64_t ordinal)
    : actions_(actions), digits_(actions->size(), 0), ordinal_(ordinal) {
    current_.actions.resize(actions->size());
    for (std::size_t x = 0; x < actions->size(); ++x) current_[x] = (*actions)[x].front();
}

PolicySpace::iterator& PolicySpace::iterator::operator++() {
    ++ordinal_;
    for (std::size_t x = 0; x < digits_.size(); ++x) {
        const auto& a = (*actions_)[x];
        if (++digits_[x] < a.size()) {
            current_[x] = a[digits_[x]];
            return *this;
        }
        digits_[x] = 0;
        current_[x] = a.front();
    }
    return *this;
}

PolicySpace::iterator PolicySpace::begin() const { return iterator(&actions_, 0); }

PolicySpace::iterator PolicySpace::end() const {
    iterator it;
    it.ordinal_ = count_;
    return it;
}

PolicySpace enumerate_policies(const MdpModel& model, std::uint64_t cap) {
    return PolicySpace(model, cap);
}

}  // namespace sysmdp
