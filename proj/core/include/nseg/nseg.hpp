#pragma once

#include "nseg/analysis.hpp"
#include "nseg/augment.hpp"
#include "nseg/dataset.hpp"
#include "nseg/error.hpp"
#include "nseg/field.hpp"
#include "nseg/image.hpp"
#include "nseg/png_io.hpp"
#include "nseg/random.hpp"
#include "nseg/warp.hpp"
