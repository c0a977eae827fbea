#pragma once

#include <span>
#include <vector>

#include "common.hpp"

namespace psum {

/// The array left as given: O(1) update, O(n) sum. Serves as the reference
/// every other structure is checked against.
class naive_oracle {
public:
    explicit naive_oracle(std::span<const value_t> values)
        : m_values(values.begin(), values.end()) {
        require_nonempty(m_values.size());
    }

    std::size_t size() const { return m_values.size(); }

    value_t sum(std::size_t i) const {
        assert(i < size());
        value_t s = 0;
        for (std::size_t k = 0; k <= i; ++k) s = wrap_add(s, m_values[k]);
        return s;
    }

    void update(std::size_t i, value_t delta) {
        assert(i < size());
        m_values[i] = wrap_add(m_values[i], delta);
    }

    value_t access(std::size_t i) const { return m_values[i]; }
    std::span<const value_t> values() const { return m_values; }

private:
    std::vector<value_t> m_values;
};

template <prefix_sum_structure S>
value_t access(const S& s, std::size_t i) {
    require(i < s.size(), "access: index out of range");
    if (i == 0) return s.sum(0);
    return wrap_sub(s.sum(i), s.sum(i - 1));
}

template <prefix_sum_structure S>
value_t range_sum(const S& s, std::size_t i, std::size_t j) {
    require(i <= j, "range_sum: i must not exceed j");
    require(j < s.size(), "range_sum: index out of range");
    if (i == 0) return s.sum(j);
    return wrap_sub(s.sum(j), s.sum(i - 1));
}

/// Bounds-checked adapter. Structures themselves only assert, so the
/// benchmark paths stay unchecked; verification always goes through here.
template <prefix_sum_structure S>
class checked {
public:
    explicit checked(S& s) : m_s(&s) {}

    std::size_t size() const { return m_s->size(); }

    value_t sum(std::size_t i) const {
        require(i < size(), "sum: index out of range");
        return m_s->sum(i);
    }

    void update(std::size_t i, value_t delta) {
        require(i < size(), "update: index out of range");
        m_s->update(i, delta);
    }

private:
    S* m_s;
};

}  // namespace psum
