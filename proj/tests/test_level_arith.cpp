#include "doctest.h"

#include "dsc/engine_ds.hpp"
#include "dsc/engine_sc.hpp"
#include "dsc/io.hpp"
#include "dsc/oracle.hpp"
#include "dsc/reference.hpp"
#include "dsc/runner.hpp"
#include "dsc/workloads.hpp"

TEST_CASE("smoke") {
  dsc::Params p(0.2, 100, 1.0);
  dsc::BetaTable bt(p);
  CHECK(bt.pow(0) == 1.0);
}
