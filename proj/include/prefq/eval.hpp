#pragma once

#include "prefq/formula.hpp"
#include "prefq/relation.hpp"

#include <string>
#include <vector>

namespace prefq {

// Winnow evaluation strategies. Oracle and NL are correct for any
// preference formula; BNL and SFS assume a strict partial order and refuse
// other input unless forced.
enum class Algo { Oracle, NL, BNL, SFS };

Algo parse_algo(const std::string& name);
const char* algo_name(Algo a);

struct WinnowOptions {
    Algo algo = Algo::NL;
    size_t window = 64; // BNL/SFS in-memory window, in tuples
    bool force = false; // skip the order-property gates
    Budget budget{};    // bounds the gating solver work
};

// The tuples of r no other tuple of r is preferred to.
Relation winnow(const Formula& c, const Relation& r, const WinnowOptions& opts = {});

// Same computation over an explicitly ordered input; the result preserves
// the algorithm's emission order. BNL and SFS are order-sensitive when
// forced past their gates, which is observable here.
std::vector<Tuple> winnow_sequence(const Formula& c, const std::vector<Tuple>& input,
                                   const WinnowOptions& opts = {});

// n-th stratum: winnow applied after removing the first n-1 strata (n >= 1).
Relation winnow_iter(const Formula& c, const Relation& r, size_t n,
                     const WinnowOptions& opts = {});

struct RankResult {
    Relation ranked;   // input schema plus a num "rank" column, starting at 1
    Relation unranked; // nonempty only when a forced non-SPO formula stalls
};

// The input schema plus the appended num rank column ("rank", with
// underscores appended while that name is taken).
Schema ranked_schema(const Schema& s);

// Tags every tuple with the index of its stratum. Requires a strict
// partial order (which guarantees every tuple gets a rank) unless forced.
RankResult rank(const Formula& c, const Relation& r, const WinnowOptions& opts = {});

// Winnow under the strict core of c: keeps t unless some t' is strictly
// better, ignoring mutual preferences. Requires transitive c unless forced.
Relation weak_winnow(const Formula& c, const Relation& r, const WinnowOptions& opts = {});

} // namespace prefq
