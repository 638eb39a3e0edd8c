#ifndef GECVAL_GECVAL_HPP
#define GECVAL_GECVAL_HPP

#include "gecval/core.hpp"
#include "gecval/error.hpp"
#include "gecval/format.hpp"
#include "gecval/gleu.hpp"
#include "gecval/harness.hpp"
#include "gecval/io.hpp"
#include "gecval/m2.hpp"
#include "gecval/manifest.hpp"
#include "gecval/maxmatch.hpp"
#include "gecval/parallel.hpp"
#include "gecval/rational.hpp"
#include "gecval/rng.hpp"
#include "gecval/wer.hpp"

#endif  // GECVAL_GECVAL_HPP
