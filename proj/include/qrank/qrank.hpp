#pragma once

#include "qrank/bits.hpp"
#include "qrank/text.hpp"
#include "qrank/masks.hpp"
#include "qrank/quad_block.hpp"
#include "qrank/birank.hpp"
#include "qrank/birank_paired.hpp"
#include "qrank/quadrank.hpp"
#include "qrank/suffix_array.hpp"
#include "qrank/fm.hpp"
#include "qrank/dna.hpp"
