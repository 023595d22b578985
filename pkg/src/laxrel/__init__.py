"""Quantale-enriched relations, lax extensions and predicate liftings on finite sets."""

from .errors import (CapExceeded, InfiniteCarrier, IterationBoundExceeded, LaxRelError,
                     LibraryBug, MismatchError, NotFullyFaithful, QuantaleError)
from .functor import (Comp, Const, Coprod, Id, NatTrans, Neigh, Pow, Prod, VPow, apply_map,
                      apply_obj, check_functoriality, check_naturality, neigh_obj)
from .laxext import (Barr, Dual, Hausdorff, IdentityExtension, Initial, Kantorovich, Meet,
                     NeighExtension, TopExtension, check_enrichment, check_lax_laws, dual,
                     initial_extension, kantorovich, lift_to_vcat, powerset_hausdorff,
                     sim_distance, symmetrise)
from .limits import get_cap, set_cap, size_cap
from .plift import (box, diamond, greatest_induced, identity_lifting, is_enriched,
                    is_induced_by, is_monotone, is_separating, least_induced, make_lifting,
                    moss_lifting, moss_liftings, prop69_check, pushforward, transpose)
from .quantale import (Quantale, QuantaleSpec, boolean, check_quantale_laws, free_on_monoid,
                       godel, lukasiewicz, make_quantale, product_rational)
from .report import LawReport
from .vcat import (VCat, VFunctor, canonical, check_vcat, check_vfunctor, closure,
                   extend_along_embedding, is_dense_map, is_separated, natural_order,
                   power_vcat)
from .vrel import (FinMap, FinSet, VRel, compose, converse, curry, eval_rel, ext, graph,
                   identity, lift, rel_dist, uncurry)

__version__ = "0.1.0"
