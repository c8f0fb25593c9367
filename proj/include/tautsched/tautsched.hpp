#ifndef TAUTSCHED_TAUTSCHED_HPP
#define TAUTSCHED_TAUTSCHED_HPP

// Minimum-energy transmission scheduling for deadline-constrained packet
// sequences over a time-invariant AWGN link: taut-string offline optimum,
// split-and-reorder handling of a single non-FIFO packet, an arrival-driven
// online policy, and brute-force oracles that certify optimality.

#include "tautsched/common.hpp"
#include "tautsched/curve.hpp"
#include "tautsched/energy_model.hpp"
#include "tautsched/json_io.hpp"
#include "tautsched/nonfifo.hpp"
#include "tautsched/online.hpp"
#include "tautsched/oracle.hpp"
#include "tautsched/packet.hpp"
#include "tautsched/schedule.hpp"
#include "tautsched/taut_string.hpp"
#include "tautsched/workload.hpp"

#endif
