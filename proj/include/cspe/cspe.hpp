#ifndef CSPE_CSPE_HPP
#define CSPE_CSPE_HPP

#include "cspe/conformance.hpp"
#include "cspe/dot.hpp"
#include "cspe/error.hpp"
#include "cspe/monitor.hpp"
#include "cspe/sos.hpp"
#include "cspe/syntax.hpp"
#include "cspe/term.hpp"
#include "cspe/trace_set.hpp"

#endif  // CSPE_CSPE_HPP
