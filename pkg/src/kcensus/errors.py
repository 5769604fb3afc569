"""Exception hierarchy. Every error carries a stable ``code`` used in JSON reports."""


class KcensusError(Exception):
    code = "Error"

    def __init__(self, message="", **detail):
        super().__init__(message)
        self.detail = detail

    def to_dict(self):
        out = {"code": self.code, "message": str(self)}
        out.update({k: v for k, v in self.detail.items() if _jsonable(v)})
        return out


def _jsonable(v):
    return isinstance(v, (str, int, float, bool, type(None), list, tuple, dict))


def _make(name, doc):
    return type(name, (KcensusError,), {"code": name, "__doc__": doc})


MalformedInput = _make("MalformedInput", "Input file violates the network format.")
DisconnectedGraph = _make("DisconnectedGraph", "Network graph is not connected.")
ZeroCoupling = _make("ZeroCoupling", "A coupling coefficient is exactly zero.")
ScaleLimit = _make("ScaleLimit", "Exact enumeration requested beyond its size cap.")
DegenerateLifting = _make("DegenerateLifting", "Lifting did not induce a unimodular triangulation.")
NotATreeCell = _make("NotATreeCell", "Cell points do not form a spanning tree digraph.")
UnresolvedGeneric = _make("UnresolvedGeneric", "GENERIC marker reached a numeric routine.")
SingularRandomizer = _make("SingularRandomizer", "Randomization matrix is ill-conditioned.")
MissingPFData = _make("MissingPFData", "Power-flow variant needs pf data.")
MissingDelays = _make("MissingDelays", "Phase-delay variant needs delays.")
NearZeroCoordinate = _make("NearZeroCoordinate", "Laurent evaluation at a coordinate too close to 0.")
LeafPeelFailure = _make("LeafPeelFailure", "Tree start system could not be solved by leaf peeling.")
NotUnicycle = _make("NotUnicycle", "Graph does not have exactly one cycle.")
OddCycle = _make("OddCycle", "Operation needs an even cycle.")
NoBalancedSubnetwork = _make("NoBalancedSubnetwork", "No balanced subnetwork for these couplings.")
NonUniformMagnitude = _make("NonUniformMagnitude", "Cycle couplings are not of a common real magnitude.")
WrongTopology = _make("WrongTopology", "Graph is not a family of even cycles sharing one edge.")
WrongCouplingPattern = _make("WrongCouplingPattern", "Couplings do not follow the s / s*d pattern.")
InhomogeneousFrequencies = _make("InhomogeneousFrequencies", "Orbits exist only for homogeneous frequencies.")
OrbitCheckFailed = _make("OrbitCheckFailed", "Orbit residual check failed.")
SolverFailure = _make("SolverFailure", "Paths failed after all ray retries.")
