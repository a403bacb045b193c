#ifndef DEXARB_DEXARB_HPP
#define DEXARB_DEXARB_HPP

#include "dexarb/amount.hpp"
#include "dexarb/cycle_detector.hpp"
#include "dexarb/fixture.hpp"
#include "dexarb/ledger.hpp"
#include "dexarb/order_book.hpp"
#include "dexarb/rate_graph.hpp"
#include "dexarb/replay.hpp"
#include "dexarb/scenario.hpp"
#include "dexarb/strategy.hpp"

#endif
