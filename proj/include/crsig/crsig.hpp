#pragma once

#include "crsig/costmodel.hpp"
#include "crsig/errors.hpp"
#include "crsig/hashing.hpp"
#include "crsig/ledger.hpp"
#include "crsig/netsim.hpp"
#include "crsig/protocol.hpp"
#include "crsig/scenario.hpp"
#include "crsig/textconfig.hpp"
