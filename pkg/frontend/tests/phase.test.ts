import { describe, expect, it } from "vitest";

import { PhaseError, PhaseMachine, recoverEnabled, trainEnabled } from "../src/phase.js";
import type { PhaseEvent, UiPhase } from "../src/phase.js";

const ALL_PHASES: UiPhase[] = ["Idle", "Training", "Trained", "Recovering", "Recovered"];

// Walks a fresh machine along the main chain up to the wanted phase.
function driveTo(phase: UiPhase): PhaseMachine {
  const chain: PhaseEvent[] = ["train", "trainDone", "recover", "recoverDone"];
  const depth = { Idle: 0, Training: 1, Trained: 2, Recovering: 3, Recovered: 4 }[phase];
  const m = new PhaseMachine();
  for (const event of chain.slice(0, depth)) {
    m.send(event);
  }
  expect(m.current).toBe(phase);
  return m;
}

describe("PhaseMachine", () => {
  it("starts in Idle", () => {
    expect(new PhaseMachine().current).toBe("Idle");
  });

  it("walks the full chain in order", () => {
    const m = new PhaseMachine();
    expect(m.send("train")).toBe("Training");
    expect(m.send("trainDone")).toBe("Trained");
    expect(m.send("recover")).toBe("Recovering");
    expect(m.send("recoverDone")).toBe("Recovered");
  });

  it("rejects recover before any training", () => {
    const m = new PhaseMachine();
    expect(m.can("recover")).toBe(false);
    expect(() => m.send("recover")).toThrow(PhaseError);
    // a rejected move must not disturb the phase
    expect(m.current).toBe("Idle");
  });

  it("rejects recover while a train request is in flight", () => {
    const m = driveTo("Training");
    expect(m.can("recover")).toBe(false);
    expect(() => m.send("recover")).toThrow(PhaseError);
  });

  it("rejects a second recover after one completed", () => {
    const m = driveTo("Recovered");
    expect(m.can("recover")).toBe(false);
  });

  it("allows retraining from Trained", () => {
    const m = driveTo("Trained");
    expect(m.send("train")).toBe("Training");
    expect(m.send("trainDone")).toBe("Trained");
  });

  it("config edits drop back to Idle from every settled phase", () => {
    for (const phase of ["Idle", "Trained", "Recovered"] as UiPhase[]) {
      const m = driveTo(phase);
      expect(m.send("configEdit")).toBe("Idle");
    }
  });

  it("adding users drops back to Idle from every settled phase", () => {
    for (const phase of ["Idle", "Trained", "Recovered"] as UiPhase[]) {
      const m = driveTo(phase);
      expect(m.send("addUsers")).toBe("Idle");
    }
  });

  it("forbids config edits and user additions while a request runs", () => {
    for (const phase of ["Training", "Recovering"] as UiPhase[]) {
      const m = driveTo(phase);
      expect(m.can("configEdit")).toBe(false);
      expect(m.can("addUsers")).toBe(false);
      expect(() => m.send("addUsers")).toThrow(PhaseError);
    }
  });

  it("a failed request lands back in Idle", () => {
    expect(driveTo("Training").send("fail")).toBe("Idle");
    expect(driveTo("Recovering").send("fail")).toBe("Idle");
  });

  it("fail means nothing outside an in-flight phase", () => {
    for (const phase of ["Idle", "Trained", "Recovered"] as UiPhase[]) {
      expect(driveTo(phase).can("fail")).toBe(false);
    }
  });

  it("reset returns to Idle from anywhere", () => {
    for (const phase of ALL_PHASES) {
      const m = driveTo(phase);
      m.reset();
      expect(m.current).toBe("Idle");
    }
  });

  it("trainDone is only reachable from Training", () => {
    for (const phase of ["Idle", "Trained", "Recovering", "Recovered"] as UiPhase[]) {
      expect(driveTo(phase).can("trainDone")).toBe(false);
    }
  });
});

describe("button guards", () => {
  it("train needs Idle or Trained plus at least one user", () => {
    for (const phase of ALL_PHASES) {
      expect(trainEnabled(phase, 0)).toBe(false);
      const withUsers = phase === "Idle" || phase === "Trained";
      expect(trainEnabled(phase, 1)).toBe(withUsers);
      expect(trainEnabled(phase, 100)).toBe(withUsers);
    }
  });

  it("recover is enabled in Trained and nowhere else", () => {
    for (const phase of ALL_PHASES) {
      expect(recoverEnabled(phase)).toBe(phase === "Trained");
    }
  });
});
