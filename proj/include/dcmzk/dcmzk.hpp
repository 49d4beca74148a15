#pragma once

#include "dcmzk/channel.hpp"
#include "dcmzk/dcm.hpp"
#include "dcmzk/dcnm.hpp"
#include "dcmzk/digest.hpp"
#include "dcmzk/enumerate.hpp"
#include "dcmzk/errors.hpp"
#include "dcmzk/exact.hpp"
#include "dcmzk/gi.hpp"
#include "dcmzk/group.hpp"
#include "dcmzk/permutation.hpp"
#include "dcmzk/protocol.hpp"
#include "dcmzk/random.hpp"
#include "dcmzk/session.hpp"
#include "dcmzk/simulator.hpp"
#include "dcmzk/stats.hpp"
#include "dcmzk/view.hpp"
#include "dcmzk/wire.hpp"
