#include "fluxladder/basis.hpp"

#include <algorithm>

#include "fluxladder/errors.hpp"

namespace fluxladder {

std::string occupation_string(std::span<const std::uint8_t> occ) {
    std::string s;
    s.reserve(occ.size());
    for (std::uint8_t n : occ) {
        if (n > 9) throw_invalid("occupation_string: digit > 9 not representable");
        s.push_back(static_cast<char>('0' + n));
    }
    return s;
}

Occupation parse_occupation_string(const std::string& s) {
    Occupation occ;
    occ.reserve(s.size());
    for (char c : s) {
        if (c < '0' || c > '9') throw_invalid("parse_occupation_string: non-digit character");
        occ.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return occ;
}

namespace {

// Emits all occupations with the given remaining total in descending
// lexicographic order: the leading site takes its largest feasible value
// first, so the overall enumeration is already canonically sorted.
void enumerate_rec(int sites_left, int total_left, int n_max, Occupation& prefix,
                   std::vector<std::uint8_t>& table) {
    if (sites_left == 1) {
        prefix.push_back(static_cast<std::uint8_t>(total_left));
        table.insert(table.end(), prefix.begin(), prefix.end());
        prefix.pop_back();
        return;
    }
    const int hi = std::min(n_max, total_left);
    const int lo = std::max(0, total_left - n_max * (sites_left - 1));
    for (int n = hi; n >= lo; --n) {
        prefix.push_back(static_cast<std::uint8_t>(n));
        enumerate_rec(sites_left - 1, total_left - n, n_max, prefix, table);
        prefix.pop_back();
    }
}

// Compares occupation tuples for the descending canonical order.
bool lex_greater(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

FockBasis::FockBasis(int n_sites, int total, int n_max) {
    if (n_sites < 1) throw_invalid("build_basis: n_sites must be >= 1");
    if (n_max < 1) throw_invalid("build_basis: n_max must be >= 1");
    if (total < 0 || total > n_sites * n_max)
        throw_invalid("build_basis: total must lie in [0, n_sites*n_max]");
    n_sites_ = n_sites;
    n_max_ = n_max;
    total_ = total;
    Occupation prefix;
    prefix.reserve(static_cast<std::size_t>(n_sites));
    enumerate_rec(n_sites, total, n_max, prefix, table_);
    dim_ = table_.size() / static_cast<std::size_t>(n_sites);
}

std::optional<std::size_t> FockBasis::find(std::span<const std::uint8_t> occ) const {
    if (occ.size() != static_cast<std::size_t>(n_sites_)) return std::nullopt;
    int sum = 0;
    for (std::uint8_t n : occ) {
        if (n > n_max_) return std::nullopt;
        sum += n;
    }
    if (sum != total_) return std::nullopt;
    // Binary search in the descending-lexicographic table.
    std::size_t lo = 0, hi = dim_;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (lex_greater(state(mid), occ))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < dim_) {
        auto s = state(lo);
        if (std::equal(s.begin(), s.end(), occ.begin())) return lo;
    }
    return std::nullopt;
}

BasisSignature FockBasis::signature() const {
    return {false, n_sites_, total_, n_max_};
}

std::size_t FockBasis::count_states(int n_sites, int total, int n_max) {
    if (total < 0 || n_sites < 1) return 0;
    // DP over sites; independent of the enumeration above.
    std::vector<std::size_t> count(static_cast<std::size_t>(total) + 1, 0);
    count[0] = 1;
    for (int s = 0; s < n_sites; ++s) {
        std::vector<std::size_t> next(count.size(), 0);
        for (int t = 0; t <= total; ++t) {
            if (count[static_cast<std::size_t>(t)] == 0) continue;
            for (int n = 0; n <= n_max && t + n <= total; ++n)
                next[static_cast<std::size_t>(t + n)] += count[static_cast<std::size_t>(t)];
        }
        count.swap(next);
    }
    return count[static_cast<std::size_t>(total)];
}

MultiSectorBasis::MultiSectorBasis(int n_sites, int max_total, int n_max) {
    if (n_sites < 1) throw_invalid("multi_sector_basis: n_sites must be >= 1");
    if (n_max < 1) throw_invalid("multi_sector_basis: n_max must be >= 1");
    if (max_total < 0 || max_total > n_sites * n_max)
        throw_invalid("multi_sector_basis: max_total must lie in [0, n_sites*n_max]");
    n_sites_ = n_sites;
    n_max_ = n_max;
    max_total_ = max_total;
    offsets_.reserve(static_cast<std::size_t>(max_total) + 2);
    offsets_.push_back(0);
    for (int total = 0; total <= max_total; ++total) {
        FockBasis block(n_sites, total, n_max);
        table_.insert(table_.end(), block.table().begin(), block.table().end());
        offsets_.push_back(offsets_.back() + block.dim());
    }
    dim_ = offsets_.back();
}

std::size_t MultiSectorBasis::sector_dim(int total) const {
    return offsets_.at(static_cast<std::size_t>(total) + 1) -
           offsets_.at(static_cast<std::size_t>(total));
}

std::optional<std::size_t> MultiSectorBasis::find(std::span<const std::uint8_t> occ) const {
    if (occ.size() != static_cast<std::size_t>(n_sites_)) return std::nullopt;
    int sum = 0;
    for (std::uint8_t n : occ) {
        if (n > n_max_) return std::nullopt;
        sum += n;
    }
    if (sum > max_total_) return std::nullopt;
    const std::size_t off = offsets_[static_cast<std::size_t>(sum)];
    const std::size_t end = offsets_[static_cast<std::size_t>(sum) + 1];
    // Binary search inside the sector block.
    std::size_t lo = off, hi = end;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (lex_greater(state(mid), occ))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < end) {
        auto s = state(lo);
        if (std::equal(s.begin(), s.end(), occ.begin())) return lo;
    }
    return std::nullopt;
}

BasisSignature MultiSectorBasis::signature() const {
    return {true, n_sites_, max_total_, n_max_};
}

std::shared_ptr<const FockBasis> build_basis(int n_sites, int total, int n_max) {
    return std::make_shared<const FockBasis>(n_sites, total, n_max);
}

std::shared_ptr<const MultiSectorBasis> build_multi_sector_basis(int n_sites, int max_total,
                                                                 int n_max) {
    return std::make_shared<const MultiSectorBasis>(n_sites, max_total, n_max);
}

}  // namespace fluxladder
