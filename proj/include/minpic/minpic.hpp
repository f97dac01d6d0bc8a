#ifndef MINPIC_MINPIC_HPP
#define MINPIC_MINPIC_HPP

#include "minpic/types.hpp"
#include "minpic/sic.hpp"
#include "minpic/order_search.hpp"
#include "minpic/program.hpp"
#include "minpic/relaxation.hpp"
#include "minpic/solver.hpp"
#include "minpic/baselines.hpp"
#include "minpic/outer_loop.hpp"
#include "minpic/cases.hpp"
#include "minpic/io.hpp"

#endif
