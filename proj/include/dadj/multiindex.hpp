#pragma once

#include <compare>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

namespace dadj {

// Signed p-tuple of lattice shifts.  The zero multi-index is the identity
// shift; composition of shift operators is componentwise addition.
class MultiIndex {
  public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> components) : c_(std::move(components)) {}
    MultiIndex(std::initializer_list<int> components) : c_(components) {}
    static MultiIndex zero(int p) { return MultiIndex(std::vector<int>(static_cast<size_t>(p), 0)); }
    static MultiIndex unit(int p, int direction) {
        auto j = zero(p);
        j.c_[static_cast<size_t>(direction)] = 1;
        return j;
    }

    int dim() const { return static_cast<int>(c_.size()); }
    int operator[](int i) const { return c_[static_cast<size_t>(i)]; }
    int& operator[](int i) { return c_[static_cast<size_t>(i)]; }
    const std::vector<int>& components() const { return c_; }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (int i = 0; i < dim(); ++i) r.c_[static_cast<size_t>(i)] += o[i];
        return r;
    }
    MultiIndex operator-(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (int i = 0; i < dim(); ++i) r.c_[static_cast<size_t>(i)] -= o[i];
        return r;
    }
    MultiIndex operator-() const {
        MultiIndex r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    // Componentwise partial order.
    bool allGE(const MultiIndex& o) const {
        for (int i = 0; i < dim(); ++i)
            if (c_[static_cast<size_t>(i)] < o[i]) return false;
        return true;
    }
    bool allGE(int v) const {
        for (int x : c_)
            if (x < v) return false;
        return true;
    }
    bool allLE(const MultiIndex& o) const { return o.allGE(*this); }

    int total() const { return std::accumulate(c_.begin(), c_.end(), 0); }

    auto operator<=>(const MultiIndex& o) const = default;

    std::string str() const {
        std::string s = "[";
        for (size_t i = 0; i < c_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(c_[i]);
        }
        return s + "]";
    }

  private:
    std::vector<int> c_;
};

}  // namespace dadj
