// Five-phase control machine for the demo page.
//
// Transitions only walk the chain Idle -> Training -> Trained ->
// Recovering -> Recovered. Editing the config or adding users drops back
// to Idle, and a failed request drops back to Idle too, so the page never
// strands itself mid-phase.

export type UiPhase = "Idle" | "Training" | "Trained" | "Recovering" | "Recovered";

export type PhaseEvent =
  | "train" // Train pressed, request going out
  | "trainDone" // train response fully replayed
  | "recover" // Recover pressed, request going out
  | "recoverDone" // recovery response fully replayed
  | "configEdit" // any config field changed
  | "addUsers" // users were added to the session
  | "fail"; // the in-flight request errored

const TRANSITIONS: Record<UiPhase, Partial<Record<PhaseEvent, UiPhase>>> = {
  Idle: { train: "Training", configEdit: "Idle", addUsers: "Idle" },
  Training: { trainDone: "Trained", fail: "Idle" },
  Trained: { train: "Training", recover: "Recovering", configEdit: "Idle", addUsers: "Idle" },
  Recovering: { recoverDone: "Recovered", fail: "Idle" },
  Recovered: { configEdit: "Idle", addUsers: "Idle" },
};

export class PhaseError extends Error {
  constructor(phase: UiPhase, event: PhaseEvent) {
    super(`${event} is not allowed in phase ${phase}`);
    this.name = "PhaseError";
  }
}

export class PhaseMachine {
  private phase: UiPhase = "Idle";

  get current(): UiPhase {
    return this.phase;
  }

  can(event: PhaseEvent): boolean {
    return TRANSITIONS[this.phase][event] !== undefined;
  }

  /** Applies the event or throws PhaseError; never leaves a half-made move. */
  send(event: PhaseEvent): UiPhase {
    const next = TRANSITIONS[this.phase][event];
    if (next === undefined) {
      throw new PhaseError(this.phase, event);
    }
    this.phase = next;
    return next;
  }

  reset(): void {
    this.phase = "Idle";
  }
}

// Button guards. Train additionally needs at least one user on the grid;
// Recover needs a completed epoch, which only Trained guarantees.
export function trainEnabled(phase: UiPhase, userCount: number): boolean {
  return (phase === "Idle" || phase === "Trained") && userCount >= 1;
}

export function recoverEnabled(phase: UiPhase): boolean {
  return phase === "Trained";
}
