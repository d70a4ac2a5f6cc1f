#pragma once

// Contention functions over a sparsified state: the local greedy
// MaxWeight solver (round-synchronous RTS/CTS accounting), its two
// timing models, and CSMA with uniform backoff (optionally Q-CSMA
// weighted activation and next-slot priority carryover).

#include <vector>

#include "linksparse/policy.hpp"
#include "linksparse/rng.hpp"

namespace linksparse {

struct Schedule {
    std::vector<char> scheduled;      // over original vertices
    std::vector<int> decision_round;  // greedy only: round the vertex was scheduled, 0 otherwise
    long long message_count = 0;      // greedy only: 2 messages per undecided vertex per round
    long long collision_count = 0;    // csma only: links tied for local minimum backoff
};

// Round-synchronous local greedy: an undecided retained vertex wins when
// its weight beats every undecided retained neighbor (ties broken toward
// the lower original index); winners mute their undecided neighbors.
Schedule lgs_schedule(const SparsifiedState& s);

// Fixed-deadline timing: a scheduled link only transmits if contention
// resolved within K control messages, i.e. post-degree + 1 <= K.
// multipliers are 1 for transmitting links, else 0.
struct TimingResult {
    std::vector<char> transmit;        // over original vertices
    std::vector<double> multipliers;   // rate multiplier per original vertex
};
TimingResult apply_fixed_deadline(const Schedule& schedule, const SparsifiedState& s, int K);

// Flexible-overhead timing: control phase e = min(slot, (d^s+1) * tau)
// eats into the slot; the payload multiplier is max(0, slot - e) / comm.
TimingResult apply_flexible_overhead(const Schedule& schedule, const SparsifiedState& s,
                                     double tau_ms, double slot_ms, double comm_ms);

// Uniform-backoff CSMA. Priority links (scheduled last slot, backlog
// left) transmit before contention and mute their retained neighbors;
// everyone else draws a backoff mini-slot in {0..W-1} and wins on a
// strict local minimum. weighted == true adds the Q-CSMA activation
// coin e^w/(e^w+1). Draws are consumed for every original vertex so the
// stream does not depend on the retained set.
Schedule csma_schedule(const SparsifiedState& s, int W, bool weighted,
                       const std::vector<char>& priority, Rng& rng);

// true iff no edge of g has both endpoints masked
bool validate_independent(const ConflictGraph& g, const std::vector<char>& mask);

}  // namespace linksparse
