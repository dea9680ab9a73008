#pragma once

#include "nearstable/cacq.hpp"
#include "nearstable/certificate.hpp"
#include "nearstable/errors.hpp"
#include "nearstable/generate.hpp"
#include "nearstable/instances.hpp"
#include "nearstable/io.hpp"
#include "nearstable/model.hpp"
#include "nearstable/oracle.hpp"
#include "nearstable/polytope.hpp"
#include "nearstable/rational.hpp"
#include "nearstable/scarf.hpp"
#include "nearstable/shm.hpp"
#include "nearstable/smf.hpp"
#include "nearstable/weak_order.hpp"
