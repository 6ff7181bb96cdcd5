#pragma once

#include "domain.hpp"
#include "errors.hpp"
#include "gauss_legendre.hpp"
#include "hankel.hpp"
#include "moments.hpp"
#include "multi_index.hpp"
#include "probe.hpp"
#include "spec_io.hpp"
