#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fluxladder {

// Site occupations, site 1 first.
using Occupation = std::vector<std::uint8_t>;

// Serialize occupations as comma-free digit strings, site 1 first ("10010011").
std::string occupation_string(std::span<const std::uint8_t> occ);
Occupation parse_occupation_string(const std::string& s);

// Identifies a basis structurally so that states built from equal but
// distinct basis objects still interoperate.
struct BasisSignature {
    bool multi_sector = false;
    int n_sites = 0;
    int total = 0;  // fixed total, or maximum total for multi-sector
    int n_max = 0;
    bool operator==(const BasisSignature&) const = default;
};

// Common interface of the fixed-number and multi-sector occupation bases.
// States are stored as a flat row-major table of digits; lookup is exact.
class BasisBase {
public:
    virtual ~BasisBase() = default;

    int n_sites() const { return n_sites_; }
    int n_max() const { return n_max_; }
    std::size_t dim() const { return dim_; }

    std::span<const std::uint8_t> state(std::size_t k) const {
        return {table_.data() + k * static_cast<std::size_t>(n_sites_),
                static_cast<std::size_t>(n_sites_)};
    }
    std::string state_string(std::size_t k) const { return occupation_string(state(k)); }

    // Flat dim x n_sites digit table backing state().
    const std::vector<std::uint8_t>& table() const { return table_; }

    // Ordinal of an occupation tuple, or nullopt if not in the basis.
    virtual std::optional<std::size_t> find(std::span<const std::uint8_t> occ) const = 0;

    virtual BasisSignature signature() const = 0;

protected:
    int n_sites_ = 0;
    int n_max_ = 0;
    std::size_t dim_ = 0;
    std::vector<std::uint8_t> table_;  // dim x n_sites digits
};

// All occupations of `n_sites` sites with fixed total particle number and a
// per-site cutoff, in descending lexicographic order.
class FockBasis final : public BasisBase {
public:
    FockBasis(int n_sites, int total, int n_max);

    int total_number() const { return total_; }

    std::optional<std::size_t> find(std::span<const std::uint8_t> occ) const override;
    BasisSignature signature() const override;

    // Count of basis states without enumerating them.
    static std::size_t count_states(int n_sites, int total, int n_max);

private:
    int total_ = 0;
};

// Concatenation of FockBasis blocks for totals 0..max_total, needed once
// amplitude damping leaks particles between number sectors.  Block k starts
// at offset(k) and holds the total-k states in their canonical order.
class MultiSectorBasis final : public BasisBase {
public:
    MultiSectorBasis(int n_sites, int max_total, int n_max);

    int max_total() const { return max_total_; }
    std::size_t sector_offset(int total) const { return offsets_.at(total); }
    std::size_t sector_dim(int total) const;

    std::optional<std::size_t> find(std::span<const std::uint8_t> occ) const override;
    BasisSignature signature() const override;

private:
    int max_total_ = 0;
    std::vector<std::size_t> offsets_;  // max_total+2 entries, last = dim
};

using BasisPtr = std::shared_ptr<const BasisBase>;

// Canonical constructor used throughout: enumerates all occupations with the
// given fixed total.  Throws on invalid bounds (total outside [0, n*n_max]).
std::shared_ptr<const FockBasis> build_basis(int n_sites, int total, int n_max);
std::shared_ptr<const MultiSectorBasis> build_multi_sector_basis(int n_sites, int max_total,
                                                                 int n_max);

inline bool same_basis(const BasisBase& a, const BasisBase& b) {
    return &a == &b || a.signature() == b.signature();
}

}  // namespace fluxladder
