#pragma once

#include "lptree/core.hpp"
#include "lptree/learn.hpp"
#include "lptree/metrics.hpp"
#include "lptree/oracle.hpp"
#include "lptree/schema.hpp"
#include "lptree/synthetic.hpp"
#include "lptree/tree.hpp"
