import logging
from typing import Any, Dict, List

from langgraph.graph import END, StateGraph

from src.config import PipelineConfig
from src.errors import ConfigError
from src.stages import BinStage, EvalStage, FitStage, GenerateStage, InferStage, StageState

logger = logging.getLogger("hiercast.graph")

STAGES = {
    "generate": GenerateStage,
    "bin": BinStage,
    "fit": FitStage,
    "infer": InferStage,
    "eval": EvalStage,
}
STAGE_ORDER = list(STAGES)
COMMANDS = STAGE_ORDER + ["pipeline"]

MAX_ITERATIONS = 2 * len(STAGE_ORDER) + 2


class GraphState(StageState):
    next: str
    iterations: int


def plan_for(command: str, cfg: PipelineConfig) -> List[str]:
    if cfg.hier_data_csv is not None and command != "infer":
        raise ConfigError([f"hier_data_csv is only read by the infer command, not {command!r}"])
    if command == "pipeline":
        return [s for s in STAGE_ORDER if cfg.synthetic or s != "generate"]
    if command not in STAGES:
        raise ConfigError([f"unknown command {command!r}; expected one of {COMMANDS}"])
    return [command]


def supervisor_node(state: GraphState) -> Dict[str, Any]:
    iterations = state.get("iterations", 0) + 1
    done = set(state.get("completed", []))
    remaining = [s for s in state["plan"] if s not in done]

    if not remaining or iterations > MAX_ITERATIONS:
        logger.info(f"Supervisor: finishing (completed={sorted(done)}, iterations={iterations})")
        return {"next": "FINISH", "iterations": iterations}

    logger.debug(f"Supervisor: routing to '{remaining[0]}'")
    return {"next": remaining[0], "iterations": iterations}


def get_graph(cfg: PipelineConfig):
    workflow = StateGraph(GraphState)

    for name, stage_cls in STAGES.items():
        workflow.add_node(name, stage_cls(cfg))
        workflow.add_edge(name, "supervisor")
    workflow.add_node("supervisor", supervisor_node)

    workflow.add_conditional_edges(
        "supervisor",
        lambda x: x["next"],
        {**{name: name for name in STAGES}, "FINISH": END},
    )
    workflow.set_entry_point("supervisor")

    return workflow.compile()


def run_command(command: str, cfg: PipelineConfig) -> Dict[str, Any]:
    plan = plan_for(command, cfg)
    graph = get_graph(cfg)
    state: GraphState = {"plan": plan, "completed": [], "outputs": {}, "next": "", "iterations": 0}
    result = graph.invoke(state, config={"recursion_limit": 2 * MAX_ITERATIONS + 2})
    missing = [s for s in plan if s not in result["completed"]]
    if missing:
        logger.warning(f"Plan stopped before {missing}")
    return result
