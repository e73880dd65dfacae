#ifndef VINFO_VINFO_HPP
#define VINFO_VINFO_HPP

#include "vinfo/curves.hpp"
#include "vinfo/dataset.hpp"
#include "vinfo/error.hpp"
#include "vinfo/estimator.hpp"
#include "vinfo/io/config.hpp"
#include "vinfo/io/labels.hpp"
#include "vinfo/io/repr_codec.hpp"
#include "vinfo/io/report.hpp"
#include "vinfo/io/split.hpp"
#include "vinfo/metrics.hpp"
#include "vinfo/oracle.hpp"
#include "vinfo/probes.hpp"
#include "vinfo/random.hpp"
#include "vinfo/selfcheck.hpp"
#include "vinfo/trainer.hpp"

#endif  // VINFO_VINFO_HPP
