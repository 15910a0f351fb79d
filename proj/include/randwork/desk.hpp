// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "randwork/machines.hpp"
#include "randwork/metric.hpp"

namespace randwork {

// Standard registry used by the experiments. Every machine enumerates its graph
// one element per stage so that stage complexity keeps changing over a long run.
struct DeskMachines {
  std::size_t scratch = 0;     // Kraft-Chaitin scratch machine for tests
  std::size_t counter = 0;     // prefix code of n -> n
  std::size_t powers = 0;      // prefix code of k -> 2^k
  std::size_t pairs = 0;       // prefix code of n, two bits j -> <j, n>
  std::size_t tree_labels = 0; // prefix code of n, one bit r -> <tree point <r,n>, n>
  std::size_t solovay = 0;     // sigma -> <sigma, U(sigma), halting stage>
  std::size_t projection = 0;  // sigma -> second coordinate of U(sigma)
};

struct DeskOptions {
  std::size_t max_input_length = 28;
  bool with_solovay = true;
  bool with_projection = true;
};

inline DeskMachines install_desk_machines(UniversalMachine &u, const DeskOptions &opt = {}) {
  DeskMachines ids;
  const std::size_t cap = u.max_input_length();
  ids.scratch = u.reserve_machine("scratch");
  ids.counter = u.reserve_machine("counter");
  ids.powers = u.reserve_machine("powers");
  ids.pairs = u.reserve_machine("pairs");
  ids.tree_labels = u.reserve_machine("tree-labels");

  u.add_feeder(ids.counter, [id = ids.counter, cap](UniversalMachine &m, Stage s) {
    const Natural n(static_cast<unsigned long>(s - 1));
    BitString in = prefix_code(n);
    if (in.size() <= cap)
      m.add_entry(id, in, n, s);
  });
  u.add_feeder(ids.powers, [id = ids.powers, cap](UniversalMachine &m, Stage s) {
    if (s % 2 == 0)
      return;
    const unsigned long k = (s - 1) / 2;
    BitString in = prefix_code(Natural(k));
    if (in.size() <= cap)
      m.add_entry(id, in, pow2_natural(k), s);
  });
  u.add_feeder(ids.pairs, [id = ids.pairs, cap](UniversalMachine &m, Stage s) {
    const Natural n(static_cast<unsigned long>(s - 1));
    BitString base = prefix_code(n);
    if (base.size() + 2 > cap)
      return;
    for (unsigned j = 0; j < 4; ++j) {
      BitString in = base;
      in.push_back(j >> 1 & 1u);
      in.push_back(j & 1u);
      m.add_entry(id, in, pair(Natural(j), n), s);
    }
  });
  u.add_feeder(ids.tree_labels, [id = ids.tree_labels, cap](UniversalMachine &m, Stage s) {
    const unsigned long n = s - 1;
    BitString base = prefix_code(Natural(n));
    if (base.size() + 1 > cap)
      return;
    for (bool r : {false, true})
      m.add_entry(id, base.child(r), pair(tree_point(n, r), Natural(n)), s);
  });

  if (opt.with_solovay) {
    ids.solovay = u.reserve_machine("solovay-aux");
    u.add_observer(ids.solovay, [id = ids.solovay, cap](UniversalMachine &m, const Halting &h) {
      if (h.input.size() <= cap)
        m.add_entry(id, h.input, triple(code_of(h.input), h.output, Natural(static_cast<unsigned long>(h.stage))),
                    h.stage + 1);
    });
  }
  if (opt.with_projection) {
    ids.projection = u.reserve_machine("projection");
    u.add_observer(ids.projection, [id = ids.projection, cap](UniversalMachine &m, const Halting &h) {
      if (h.input.size() <= cap)
        m.add_entry(id, h.input, unpair(h.output).second, h.stage + 1);
    });
  }
  return ids;
}

// Plain (not prefix-free) counterpart: every string names a number directly.
struct PlainDeskMachines {
  std::size_t counter = 0;
  std::size_t pairs = 0;
  std::size_t tree_labels = 0;
};

inline PlainDeskMachines install_plain_desk_machines(UniversalMachine &u) {
  PlainDeskMachines ids;
  const std::size_t cap = u.max_input_length();
  ids.counter = u.reserve_machine("plain-counter");
  ids.pairs = u.reserve_machine("plain-pairs");
  ids.tree_labels = u.reserve_machine("plain-tree-labels");
  u.add_feeder(ids.counter, [id = ids.counter, cap](UniversalMachine &m, Stage s) {
    const Natural n(static_cast<unsigned long>(s - 1));
    BitString in = string_of(n);
    if (in.size() <= cap)
      m.add_entry(id, in, n, s);
  });
  u.add_feeder(ids.pairs, [id = ids.pairs, cap](UniversalMachine &m, Stage s) {
    const Natural n(static_cast<unsigned long>(s - 1));
    BitString base = string_of(n);
    if (base.size() + 2 > cap)
      return;
    for (unsigned j = 0; j < 4; ++j) {
      BitString in = base;
      in.push_back(j >> 1 & 1u);
      in.push_back(j & 1u);
      m.add_entry(id, in, pair(Natural(j), n), s);
    }
  });
  u.add_feeder(ids.tree_labels, [id = ids.tree_labels, cap](UniversalMachine &m, Stage s) {
    const unsigned long n = s - 1;
    BitString base = string_of(Natural(n));
    if (base.size() + 1 > cap)
      return;
    for (bool r : {false, true})
      m.add_entry(id, base.child(r), pair(tree_point(n, r), Natural(n)), s);
  });
  return ids;
}

} // namespace randwork
