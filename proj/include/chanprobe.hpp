#pragma once

#include "chanprobe/b2b_curve.hpp"
#include "chanprobe/bench.hpp"
#include "chanprobe/catalog.hpp"
#include "chanprobe/conversions.hpp"
#include "chanprobe/csv.hpp"
#include "chanprobe/errors.hpp"
#include "chanprobe/fixtures.hpp"
#include "chanprobe/json_io.hpp"
#include "chanprobe/link_model.hpp"
#include "chanprobe/link_spec.hpp"
#include "chanprobe/measurement.hpp"
#include "chanprobe/pipeline.hpp"
#include "chanprobe/probing.hpp"
#include "chanprobe/regime.hpp"
