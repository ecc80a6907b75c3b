#include "nqlab/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include "nqlab/errors.hpp"
#include "fft.hpp"

namespace nqlab {

PrimeTable::PrimeTable(std::uint64_t limit) : limit_(limit) {
    const std::uint64_t n_odd = limit / 2 + 1;  // odd numbers 1,3,...,<= limit (+1 slack)
    odd_bits_.assign(n_odd / 64 + 1, 0);
    odd_bits_[0] |= 1;  // 1 is not prime
    for (std::uint64_t p = 3; p * p <= limit; p += 2) {
        const std::uint64_t k = p / 2;
        if (odd_bits_[k >> 6] >> (k & 63) & 1) continue;
        for (std::uint64_t q = p * p; q <= limit; q += 2 * p) {
            const std::uint64_t j = q / 2;
            odd_bits_[j >> 6] |= std::uint64_t{1} << (j & 63);
        }
    }
}

bool PrimeTable::is_prime(std::uint64_t n) const {
    if (n > limit_) throw DomainError("is_prime: " + std::to_string(n) + " beyond sieve limit " + std::to_string(limit_));
    if (n < 2) return false;
    if (n == 2) return true;
    if (n % 2 == 0) return false;
    const std::uint64_t k = n / 2;
    return !(odd_bits_[k >> 6] >> (k & 63) & 1);
}

std::vector<std::uint64_t> PrimeTable::primes() const {
    std::vector<std::uint64_t> out;
    if (limit_ >= 2) out.push_back(2);
    for (std::uint64_t n = 3; n <= limit_; n += 2)
        if (is_prime(n)) out.push_back(n);
    return out;
}

std::size_t PrimeTable::count() const {
    std::size_t c = limit_ >= 2 ? 1 : 0;
    for (std::uint64_t n = 3; n <= limit_; n += 2) c += is_prime(n);
    return c;
}

std::vector<std::uint64_t> primes_upto(std::uint64_t limit) {
    if (limit < 2) throw DomainError("primes_upto: limit must be >= 2");
    return PrimeTable(limit).primes();
}

bool is_lower_twin(const PrimeTable& table, std::uint64_t p) {
    if (!table.is_prime(p)) throw DomainError("is_lower_twin: " + std::to_string(p) + " is not prime");
    return table.is_prime(p + 2);
}

bool is_lower_twin(std::uint64_t p) {
    return is_lower_twin(PrimeTable(std::max<std::uint64_t>(p + 2, 16)), p);
}

std::vector<std::uint64_t> sums_of_two_squares_upto(std::uint64_t limit) {
    std::vector<char> hit(limit + 1, 0);
    for (std::uint64_t a = 0; a * a <= limit; ++a)
        for (std::uint64_t b = a; a * a + b * b <= limit; ++b) hit[a * a + b * b] = 1;
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = 1; s <= limit; ++s)
        if (hit[s]) out.push_back(s);
    return out;
}

std::vector<std::uint64_t> first_sums_of_two_squares(std::size_t count) {
    std::uint64_t limit = std::max<std::uint64_t>(16, 2 * count);
    for (;;) {
        auto s = sums_of_two_squares_upto(limit);
        if (s.size() >= count) {
            s.resize(count);
            return s;
        }
        limit *= 2;
    }
}

GoldbachPartition goldbach_partitions(const PrimeTable& table, std::uint64_t w) {
    if (w % 2 != 0 || w < 6) throw DomainError("goldbach_partitions: w must be even and >= 6, got " + std::to_string(w));
    if (w > table.limit()) throw DomainError("goldbach_partitions: w beyond sieve limit");
    GoldbachPartition g;
    g.w = w;
    for (std::uint64_t p = 3; 2 * p <= w; p += 2)
        if (table.is_prime(p) && table.is_prime(w - p)) g.pairs.emplace_back(p, w - p);
    return g;
}

GoldbachPartition goldbach_partitions(std::uint64_t w) {
    return goldbach_partitions(PrimeTable(std::max<std::uint64_t>(w, 16)), w);
}

NltStatus is_nlt(const PrimeTable& table, std::uint64_t w) {
    const auto g = goldbach_partitions(table, w);
    if (g.pairs.empty()) return NltStatus::GoldbachViolation;
    if (w + 2 > table.limit()) throw DomainError("is_nlt: sieve must cover w+2");
    for (auto [p1, p2] : g.pairs)
        if (table.is_prime(p1 + 2) || table.is_prime(p2 + 2)) return NltStatus::NotNlt;
    return NltStatus::Nlt;
}

NltStatus is_nlt(std::uint64_t w) { return is_nlt(PrimeTable(std::max<std::uint64_t>(w + 2, 16)), w); }

namespace {

// Ordered-pair counts via FFT: out[w] = sum_i a[i] b[w-i].
std::vector<std::uint64_t> convolve_counts(const std::vector<double>& a, const std::vector<double>& b) {
    const auto c = detail::real_convolution(a, b);
    std::vector<std::uint64_t> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = static_cast<std::uint64_t>(std::llround(std::max(0.0, c[i])));
    return out;
}

}  // namespace

NltCensus nlt_census(std::uint64_t limit, unsigned jobs) {
    if (limit < 38) throw DomainError("nlt_census: limit must be >= 38");
    const PrimeTable table(limit + 2);
    std::vector<double> odd_prime(limit + 1, 0.0), lower_twin(limit + 1, 0.0);
    for (std::uint64_t n = 3; n <= limit; n += 2) {
        if (!table.is_prime(n)) continue;
        odd_prime[n] = 1.0;
        if (table.is_prime(n + 2)) lower_twin[n] = 1.0;
    }
    const auto pp = convolve_counts(odd_prime, odd_prime);
    const auto tp = convolve_counts(lower_twin, odd_prime);

    NltCensus c;
    c.limit = limit;
    const std::size_t n_rows = (limit - 6) / 2 + 1;
    c.rows.resize(n_rows);
    jobs = std::max(1u, jobs);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const std::uint64_t w = 6 + 2 * r;
            const std::uint64_t ordered = pp[w];
            const std::uint64_t partitions = (ordered + static_cast<std::uint64_t>(odd_prime[w / 2])) / 2;
            NltStatus s = NltStatus::NotNlt;
            if (partitions == 0) s = NltStatus::GoldbachViolation;
            else if (tp[w] == 0) s = NltStatus::Nlt;
            c.rows[r] = {w, s, partitions};
        }
    };
    if (jobs == 1) {
        work(0, n_rows);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_rows + jobs - 1) / jobs;
        for (unsigned j = 0; j < jobs; ++j) {
            const std::size_t b = j * chunk, e = std::min(n_rows, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& row : c.rows) {
        if (row.status == NltStatus::Nlt) c.members.push_back(row.w);
        if (row.status == NltStatus::GoldbachViolation) c.goldbach_violations.push_back(row.w);
    }
    c.count = c.members.size();
    const double N = static_cast<double>(limit);
    c.lower_bound_check = static_cast<double>(c.count) >= N / 30.0 - 19.0 / 15.0;
    c.estimate_ratio = static_cast<double>(c.count) / (N / 6.0);
    const std::set<std::uint64_t> member_set(c.members.begin(), c.members.end());
    c.provable_sequence_ok = true;
    for (std::uint64_t k = 1; 2 * (15 * k + 4) <= limit; ++k)
        if (!member_set.count(2 * (15 * k + 4))) c.provable_sequence_ok = false;
    return c;
}

bool LemmaReport::all_ok() const {
    return lemma1_failures.empty() && lemma2_failures.empty() && sequence_failures.empty() &&
           goldbach_violations.empty() && lower_bound_ok;
}

LemmaReport verify_nlt_lemmas(std::uint64_t limit, unsigned jobs) {
    LemmaReport r;
    r.limit = limit;
    const PrimeTable table(limit + 2);
    for (std::uint64_t p = 5; p <= limit; p += 2) {
        if (!table.is_prime(p) || !table.is_prime(p + 2)) continue;
        ++r.lower_twins_checked;
        if (p % 3 != 2) r.lemma1_failures.push_back(p);
    }
    const auto census = nlt_census(limit, jobs);
    r.goldbach_violations = census.goldbach_violations;
    auto nlt_at = [&](std::uint64_t w) { return census.rows[(w - 6) / 2].status == NltStatus::Nlt; };
    for (std::uint64_t w = 8; w <= limit; w += 6) {
        if (table.is_prime(w - 3)) continue;
        ++r.lemma2_checked;
        if (!nlt_at(w)) r.lemma2_failures.push_back(w);
    }
    for (std::uint64_t k = 1; 2 * (15 * k + 4) <= limit; ++k) {
        ++r.sequence_checked;
        if (!nlt_at(2 * (15 * k + 4))) r.sequence_failures.push_back(2 * (15 * k + 4));
    }
    r.nlt_count = census.count;
    r.lower_bound = static_cast<double>(limit) / 30.0 - 19.0 / 15.0;
    r.lower_bound_ok = census.lower_bound_check;
    r.estimate_ratio = census.estimate_ratio;
    return r;
}

std::string to_string(SequenceKind kind) {
    switch (kind) {
        case SequenceKind::Primes: return "primes";
        case SequenceKind::PrimesGt2: return "primes-gt2";
        case SequenceKind::LnNaturals: return "ln-naturals";
        case SequenceKind::LnNaturalsWithHoles: return "ln-naturals-holes";
        case SequenceKind::LnSumTwoSquares: return "ln-sum-two-squares";
        case SequenceKind::Custom: return "custom";
    }
    return "unknown";
}

SequenceKind sequence_kind_from_string(const std::string& name) {
    for (auto k : {SequenceKind::Primes, SequenceKind::PrimesGt2, SequenceKind::LnNaturals,
                   SequenceKind::LnNaturalsWithHoles, SequenceKind::LnSumTwoSquares, SequenceKind::Custom})
        if (to_string(k) == name) return k;
    throw DomainError("unknown sequence kind '" + name + "'");
}

long Spectrum::index_of_label(long label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<long>(it - labels.begin());
}

Spectrum target_spectrum(const SequenceSpec& spec, double U0) {
    if (spec.count < 1) throw DomainError("target_spectrum: count must be >= 1");
    if (!(U0 > 0)) throw DomainError("target_spectrum: U0 must be positive");
    if (!spec.holes.empty() && spec.kind != SequenceKind::LnNaturalsWithHoles)
        throw DomainError("target_spectrum: holes are only valid for " + to_string(SequenceKind::LnNaturalsWithHoles));
    Spectrum s;
    s.kind = spec.kind;
    s.N_b = spec.count;
    s.U0 = U0;
    const auto N = static_cast<std::size_t>(spec.count);
    switch (spec.kind) {
        case SequenceKind::Primes:
        case SequenceKind::PrimesGt2: {
            const std::size_t skip = spec.kind == SequenceKind::PrimesGt2 ? 1 : 0;
            std::uint64_t limit = 64;
            std::vector<std::uint64_t> ps;
            while ((ps = primes_upto(limit)).size() < N + skip) limit *= 2;
            for (std::size_t i = 0; i < N; ++i) {
                s.labels.push_back(static_cast<long>(ps[i + skip]));
                s.energies.push_back(U0 * static_cast<double>(ps[i + skip]));
            }
            break;
        }
        case SequenceKind::LnNaturals:
            for (std::size_t n = 1; n <= N; ++n) {
                s.labels.push_back(static_cast<long>(n));
                s.energies.push_back(U0 * std::log(static_cast<double>(n)));
            }
            break;
        case SequenceKind::LnNaturalsWithHoles: {
            std::vector<int> h = spec.holes;
            std::sort(h.begin(), h.end());
            if (std::adjacent_find(h.begin(), h.end()) != h.end())
                throw DomainError("target_spectrum: duplicate hole");
            if (h.size() % 2 != 0) throw DomainError("target_spectrum: holes must be removed in pairs to keep parity alternation");
            for (int x : h)
                if (x < 2 || x > spec.count)
                    throw DomainError("target_spectrum: hole " + std::to_string(x) + " outside 2.." + std::to_string(spec.count));
            if (static_cast<int>(h.size()) >= spec.count) throw DomainError("target_spectrum: holes remove every level");
            s.holes = h;
            for (std::size_t n = 1; n <= N; ++n) {
                if (std::binary_search(h.begin(), h.end(), static_cast<int>(n))) continue;
                s.labels.push_back(static_cast<long>(n));
                s.energies.push_back(U0 * std::log(static_cast<double>(n)));
            }
            break;
        }
        case SequenceKind::Custom:
            throw DomainError("target_spectrum: custom spectra are built with custom_spectrum()");
        case SequenceKind::LnSumTwoSquares: {
            const auto sq = first_sums_of_two_squares(N);
            for (auto v : sq) {
                s.labels.push_back(static_cast<long>(v));
                s.energies.push_back(U0 * std::log(static_cast<double>(v)));
            }
            break;
        }
    }
    return s;
}

Spectrum custom_spectrum(std::vector<double> energies, double U0) {
    if (energies.empty()) throw DomainError("custom_spectrum: empty");
    Spectrum s;
    s.kind = SequenceKind::Custom;
    s.N_b = static_cast<int>(energies.size());
    s.U0 = U0;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        if (i > 0 && !(energies[i] > energies[i - 1])) throw DomainError("custom_spectrum: energies must be strictly ascending");
        s.labels.push_back(static_cast<long>(i + 1));
    }
    s.energies = std::move(energies);
    return s;
}

}  // namespace nqlab
