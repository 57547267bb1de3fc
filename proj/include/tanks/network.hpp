#pragma once

#include "tanks/matrix.hpp"
#include "tanks/scalar.hpp"

#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace tanks {

/// Liabilities matrix plus cash vector, with the derived total-debt vector and
/// row-stochastic relative-liabilities matrix. Immutable once built.
///
/// liabilities(i, j) is the amount bank i owes bank j. Row i of relative() is
/// liabilities row i divided by total_debt(i); a bank with no debt gets the
/// unit self-loop relative(i, i) = 1.
template <class T>
class FinancialNetwork {
public:
    FinancialNetwork(Matrix<T> liabilities, Vector<T> cash, std::vector<std::string> ids = {})
        : liabilities_(std::move(liabilities)), cash_(std::move(cash)), ids_(std::move(ids)) {
        validate();
        derive();
    }

    std::size_t size() const noexcept { return cash_.size(); }
    const Matrix<T>& liabilities() const noexcept { return liabilities_; }
    const Vector<T>& cash() const noexcept { return cash_; }
    const Vector<T>& total_debt() const noexcept { return total_debt_; }
    const Matrix<T>& relative() const noexcept { return relative_; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const std::string& id(std::size_t i) const { return ids_.at(i); }

    /// Same liabilities, different cash vector.
    FinancialNetwork with_cash(Vector<T> cash) const { return FinancialNetwork(liabilities_, std::move(cash), ids_); }

    /// Largest of the initial cash values and total debts; the money scale used
    /// for float-mode zero detection.
    T money_scale() const {
        T s(0);
        for (std::size_t i = 0; i < size(); ++i) {
            if (cash_[i] > s) s = cash_[i];
            if (total_debt_[i] > s) s = total_debt_[i];
        }
        return s;
    }

    /// Smallest strictly positive cash or liability entry (0 if none).
    T min_positive_datum() const {
        T best(0);
        auto consider = [&best](const T& v) {
            if (v > T(0) && (best == T(0) || v < best)) best = v;
        };
        for (std::size_t i = 0; i < size(); ++i) {
            consider(cash_[i]);
            for (std::size_t j = 0; j < size(); ++j) consider(liabilities_(i, j));
        }
        return best;
    }

    /// Threshold at or below which an amount is treated as zero; exactly zero
    /// for exact scalars.
    T zero_tolerance() const {
        if constexpr (is_exact_v<T>)
            return T(0);
        else
            return scalar_traits<T>::zero_rel * std::max(1.0, money_scale());
    }

    bool has_creditor_link(std::size_t debtor, std::size_t creditor) const {
        return liabilities_(debtor, creditor) > T(0);
    }

    friend bool operator==(const FinancialNetwork& a, const FinancialNetwork& b) {
        return a.liabilities_ == b.liabilities_ && a.cash_ == b.cash_ && a.ids_ == b.ids_;
    }

private:
    void validate() {
        const std::size_t n = cash_.size();
        if (!liabilities_.square())
            throw Error(ErrorKind::DimensionMismatch, "liabilities matrix is not square");
        if (liabilities_.rows() != n)
            throw Error(ErrorKind::DimensionMismatch, "liabilities matrix has " + std::to_string(liabilities_.rows()) +
                                                          " rows but cash vector has " + std::to_string(n) + " entries");
        if (ids_.empty()) {
            for (std::size_t i = 0; i < n; ++i) ids_.push_back(std::to_string(i + 1));
        } else if (ids_.size() != n) {
            throw Error(ErrorKind::DimensionMismatch, "id list length does not match bank count");
        }
        std::unordered_set<std::string> seen;
        for (const auto& id : ids_)
            if (!seen.insert(id).second) throw Error(ErrorKind::SchemaError, "duplicate bank id '" + id + "'");
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_finite(cash_[i])) throw Error(ErrorKind::NegativeEntry, "cash of bank " + ids_[i] + " is not finite");
            if (cash_[i] < T(0)) throw Error(ErrorKind::NegativeEntry, "cash of bank " + ids_[i] + " is negative");
            for (std::size_t j = 0; j < n; ++j) {
                const T& v = liabilities_(i, j);
                if (!is_finite(v) || v < T(0))
                    throw Error(ErrorKind::NegativeEntry,
                                "liability " + ids_[i] + "->" + ids_[j] + " is negative or not finite");
            }
            if (liabilities_(i, i) != T(0)) throw Error(ErrorKind::SelfDebt, "bank " + ids_[i] + " owes itself");
        }
    }

    void derive() {
        const std::size_t n = cash_.size();
        total_debt_.assign(n, T(0));
        relative_ = Matrix<T>(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) total_debt_[i] += liabilities_(i, j);
            if (total_debt_[i] == T(0)) {
                relative_(i, i) = T(1);
            } else {
                for (std::size_t j = 0; j < n; ++j) relative_(i, j) = liabilities_(i, j) / total_debt_[i];
            }
        }
    }

    Matrix<T> liabilities_;
    Vector<T> cash_;
    std::vector<std::string> ids_;
    Vector<T> total_debt_;
    Matrix<T> relative_;
};

template <class T>
FinancialNetwork<T> build_network(Matrix<T> liabilities, Vector<T> cash, std::vector<std::string> ids = {}) {
    return FinancialNetwork<T>(std::move(liabilities), std::move(cash), std::move(ids));
}

/// Converts an exact network to another scalar type (e.g. for float runs or
/// the float Picard oracle).
template <class U, class T>
FinancialNetwork<U> convert_network(const FinancialNetwork<T>& net) {
    const std::size_t n = net.size();
    Matrix<U> l(n, n);
    Vector<U> c(n);
    for (std::size_t i = 0; i < n; ++i) {
        if constexpr (std::is_same_v<U, T>) {
            c[i] = net.cash()[i];
        } else if constexpr (std::is_same_v<U, double>) {
            c[i] = to_double(net.cash()[i]);
        } else {
            c[i] = from_double<U>(net.cash()[i]);
        }
        for (std::size_t j = 0; j < n; ++j) {
            if constexpr (std::is_same_v<U, T>)
                l(i, j) = net.liabilities()(i, j);
            else if constexpr (std::is_same_v<U, double>)
                l(i, j) = to_double(net.liabilities()(i, j));
            else
                l(i, j) = from_double<U>(net.liabilities()(i, j));
        }
    }
    return FinancialNetwork<U>(std::move(l), std::move(c), net.ids());
}

// ---------------------------------------------------------------------------
// Status partition

enum class Status { Positive, Zero, Absorbing };

constexpr std::string_view to_string(Status s) noexcept {
    switch (s) {
        case Status::Positive: return "positive";
        case Status::Zero: return "zero";
        case Status::Absorbing: return "absorbing";
    }
    return "?";
}

/// Absorbing iff nothing is owed; otherwise Positive or Zero by cash.
template <class T>
Status classify(const T& remaining_debt, const T& cash, const T& tol = T(0)) {
    if (remaining_debt <= tol) return Status::Absorbing;
    return cash > tol ? Status::Positive : Status::Zero;
}

struct Partition {
    std::vector<Status> statuses;

    std::size_t size() const noexcept { return statuses.size(); }
    Status operator[](std::size_t i) const { return statuses.at(i); }

    BankSet members(Status s) const {
        BankSet out;
        for (std::size_t i = 0; i < statuses.size(); ++i)
            if (statuses[i] == s) out.push_back(i);
        return out;
    }
    BankSet positive() const { return members(Status::Positive); }
    BankSet zero() const { return members(Status::Zero); }
    BankSet absorbing() const { return members(Status::Absorbing); }

    bool any(Status s) const {
        for (auto st : statuses)
            if (st == s) return true;
        return false;
    }

    friend bool operator==(const Partition&, const Partition&) = default;
};

template <class T>
Partition initial_partition(const FinancialNetwork<T>& net) {
    Partition p;
    p.statuses.reserve(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) p.statuses.push_back(classify(net.total_debt()[i], net.cash()[i]));
    return p;
}

}  // namespace tanks
