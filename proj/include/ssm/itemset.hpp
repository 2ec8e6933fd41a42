#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "ssm/errors.hpp"

namespace ssm {

// A set of product ids backed by a 64-bit mask. Ids are 1-based; id i lives
// at bit i-1. Id 0 denotes the outside (no-purchase) option and is never a
// member of an ItemSet; "S plus outside" is handled by callers.
class ItemSet {
public:
    constexpr ItemSet() = default;
    constexpr explicit ItemSet(std::uint64_t mask) : bits_(mask) {}

    static ItemSet of(std::initializer_list<int> ids) {
        ItemSet s;
        for (int id : ids) s = s.with(id);
        return s;
    }

    // ids must be in 1..63; duplicates are merged.
    static ItemSet from_ids(const std::vector<int>& ids) {
        ItemSet s;
        for (int id : ids) s = s.with(id);
        return s;
    }

    constexpr std::uint64_t mask() const { return bits_; }
    constexpr int size() const { return std::popcount(bits_); }
    constexpr bool empty() const { return bits_ == 0; }

    constexpr bool contains(int id) const {
        return id >= 1 && id <= 63 && (bits_ >> (id - 1) & 1u) != 0;
    }

    ItemSet with(int id) const {
        check_id(id);
        return ItemSet(bits_ | std::uint64_t(1) << (id - 1));
    }

    ItemSet without(int id) const {
        check_id(id);
        return ItemSet(bits_ & ~(std::uint64_t(1) << (id - 1)));
    }

    constexpr ItemSet operator&(ItemSet o) const { return ItemSet(bits_ & o.bits_); }
    constexpr ItemSet operator|(ItemSet o) const { return ItemSet(bits_ | o.bits_); }
    constexpr ItemSet operator-(ItemSet o) const { return ItemSet(bits_ & ~o.bits_); }
    constexpr bool operator==(const ItemSet&) const = default;

    constexpr bool subset_of(ItemSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool intersects(ItemSet o) const { return (bits_ & o.bits_) != 0; }

    // Smallest member id; set must be nonempty.
    int lowest() const {
        if (bits_ == 0) throw DomainError("lowest() on empty item set");
        return std::countr_zero(bits_) + 1;
    }

    std::vector<int> ids() const {
        std::vector<int> out;
        out.reserve(size());
        for (std::uint64_t m = bits_; m; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
        return out;
    }

    // Range over member ids in increasing order.
    class Iter {
    public:
        constexpr explicit Iter(std::uint64_t m) : rest_(m) {}
        int operator*() const { return std::countr_zero(rest_) + 1; }
        Iter& operator++() {
            rest_ &= rest_ - 1;
            return *this;
        }
        constexpr bool operator!=(const Iter& o) const { return rest_ != o.rest_; }

    private:
        std::uint64_t rest_;
    };
    constexpr Iter begin() const { return Iter(bits_); }
    constexpr Iter end() const { return Iter(0); }

    // "{1,3,5}" with ids ascending; "{}" when empty.
    std::string str() const {
        std::string out = "{";
        bool first = true;
        for (int id : *this) {
            if (!first) out += ',';
            out += std::to_string(id);
            first = false;
        }
        out += '}';
        return out;
    }

private:
    static void check_id(int id) {
        if (id < 1 || id > 63)
            throw DomainError("product id " + std::to_string(id) + " outside 1..63");
    }

    std::uint64_t bits_ = 0;
};

// The ground set of products 1..n. Capacity is capped at 63 so any subset
// fits one mask word alongside the outside option's reserved id 0.
struct Universe {
    int n = 0;

    static Universe of(int n) {
        if (n < 1 || n > 63)
            throw DomainError("universe size " + std::to_string(n) + " outside 1..63");
        return Universe{n};
    }

    constexpr ItemSet full() const {
        return ItemSet(n == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << n) - 1);
    }

    constexpr bool covers(ItemSet s) const { return s.subset_of(full()); }

    void require_covers(ItemSet s, const char* role) const {
        if (!covers(s))
            throw DomainError(std::string(role) + " " + s.str() + " not within universe of size " +
                              std::to_string(n));
    }

    // Valid chooseable alternative: a member of s, or 0 for the outside option.
    constexpr bool valid_choice(ItemSet s, int id) const {
        return id == 0 || s.contains(id);
    }

    constexpr bool operator==(const Universe&) const = default;
};

// Visits every subset of s exactly once, empty set first, s itself last.
template <typename F>
void for_each_subset(ItemSet s, F&& f) {
    const std::uint64_t m = s.mask();
    std::uint64_t sub = 0;
    while (true) {
        f(ItemSet(sub));
        if (sub == m) break;
        sub = (sub - m) & m; // next submask in increasing numeric order
    }
}

// Neumaier-compensated accumulator for sums whose terms alternate in sign.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace ssm
