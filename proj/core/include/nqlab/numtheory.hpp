#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nqlab {

// Bit-packed sieve of Eratosthenes over odd numbers. Immutable once built.
class PrimeTable {
public:
    explicit PrimeTable(std::uint64_t limit);

    std::uint64_t limit() const { return limit_; }
    bool is_prime(std::uint64_t n) const;
    std::vector<std::uint64_t> primes() const;
    std::size_t count() const;

private:
    std::uint64_t limit_;
    std::vector<std::uint64_t> odd_bits_;  // bit k set <=> 2k+1 is composite
};

std::vector<std::uint64_t> primes_upto(std::uint64_t limit);

bool is_lower_twin(const PrimeTable& table, std::uint64_t p);
bool is_lower_twin(std::uint64_t p);

std::vector<std::uint64_t> sums_of_two_squares_upto(std::uint64_t limit);
std::vector<std::uint64_t> first_sums_of_two_squares(std::size_t count);

struct GoldbachPartition {
    std::uint64_t w = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;  // p1 <= p2, both odd primes
};

GoldbachPartition goldbach_partitions(const PrimeTable& table, std::uint64_t w);
GoldbachPartition goldbach_partitions(std::uint64_t w);

enum class NltStatus { Nlt, NotNlt, GoldbachViolation };

NltStatus is_nlt(const PrimeTable& table, std::uint64_t w);
NltStatus is_nlt(std::uint64_t w);

struct NltCensusRow {
    std::uint64_t w;
    NltStatus status;
    std::uint64_t partition_count;
};

struct NltCensus {
    std::uint64_t limit = 0;
    std::vector<std::uint64_t> members;
    std::size_t count = 0;
    bool lower_bound_check = false;      // count >= limit/30 - 19/15
    double estimate_ratio = 0.0;         // count / (limit/6)
    bool provable_sequence_ok = false;   // every 2(15k+4) <= limit is NLT
    std::vector<std::uint64_t> goldbach_violations;
    std::vector<NltCensusRow> rows;      // every even 6 <= w <= limit
};

// Exhaustive census of NLT numbers via FFT convolutions of the prime and
// lower-twin indicators. `jobs` bounds the worker threads used for the scan.
NltCensus nlt_census(std::uint64_t limit, unsigned jobs = 1);

struct LemmaReport {
    std::uint64_t limit = 0;
    std::uint64_t lower_twins_checked = 0;
    std::vector<std::uint64_t> lemma1_failures;   // lower twins > 3 not = 2 mod 3
    std::uint64_t lemma2_checked = 0;
    std::vector<std::uint64_t> lemma2_failures;   // w = 2 mod 6, w-3 composite, but not NLT
    std::uint64_t sequence_checked = 0;
    std::vector<std::uint64_t> sequence_failures; // 2(15k+4) not NLT
    std::vector<std::uint64_t> goldbach_violations;
    std::size_t nlt_count = 0;
    double lower_bound = 0.0;
    bool lower_bound_ok = false;
    double estimate_ratio = 0.0;
    bool all_ok() const;
};

LemmaReport verify_nlt_lemmas(std::uint64_t limit, unsigned jobs = 1);

enum class SequenceKind { Primes, PrimesGt2, LnNaturals, LnNaturalsWithHoles, LnSumTwoSquares, Custom };

std::string to_string(SequenceKind kind);
SequenceKind sequence_kind_from_string(const std::string& name);

struct SequenceSpec {
    SequenceKind kind = SequenceKind::LnNaturals;
    int count = 1;             // N_b; for the hole variant the label range is 1..count
    std::vector<int> holes;    // excluded labels, removed in adjacent pairs
};

struct Spectrum {
    SequenceKind kind = SequenceKind::LnNaturals;
    int N_b = 0;
    double U0 = 1.0;
    std::vector<double> energies;  // ascending
    std::vector<long> labels;      // n (ln kinds) or p (prime kinds) per level
    std::vector<int> holes;

    std::size_t size() const { return energies.size(); }
    // Index of the level carrying `label`, or -1.
    long index_of_label(long label) const;
};

Spectrum target_spectrum(const SequenceSpec& spec, double U0 = 1.0);

// Spectrum from explicit energies (labels 1..N); used for test spectra.
Spectrum custom_spectrum(std::vector<double> energies, double U0 = 1.0);

}  // namespace nqlab
