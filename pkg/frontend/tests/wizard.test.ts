import { beforeEach, describe, expect, it } from 'vitest';
import { ApiClient } from '../src/api';
import { BallsBuilder } from '../src/builder';
import type { ExtremeJudgment, StudyContext } from '../src/types';
import { WizardController } from '../src/wizard';
import { installMockServer, MockServer } from './mockServer';

let server: MockServer;
let wizard: WizardController;

beforeEach(() => {
  server = installMockServer();
  wizard = new WizardController(new ApiClient(''));
});

const context: StudyContext = {
  population: 'trial participants',
  unit: 'person',
  treatment: 'vaccine',
  control: 'placebo',
  outcome: 'infection avoided',
  time_horizon: '6 months',
  assignment: 'randomized',
  sample_size_estimate: 126,
};

function extreme(kind: 'largest' | 'smallest', effect: number): ExtremeJudgment {
  return { kind, effect, description: `${kind} case`, uncertainty: 0.05, tail_share: 0.1 };
}

describe('WizardController', () => {
  it('walks the penumbra numbers to a comparison showing 0.1', async () => {
    // a third of the population splits 50/40/10 over {0, +1, -1}; the
    // other two thirds cannot be reached. Elicited as a balls histogram
    // over [-1, 1] plus a 2/3 null share.
    await wizard.start();
    await wizard.submitContext(context);
    await wizard.submitAtePre(0.3);
    await wizard.submitExtremes(extreme('largest', 1.0), extreme('smallest', -1.0));

    // build the responder histogram ball by ball: 10 at 0, 8 at +1, 2 at -1
    const builder = new BallsBuilder(-1.5, 1.5, 3, 20);
    builder.moveAllTo(1);
    for (let k = 0; k < 8; k += 1) builder.moveBall(1, 2);
    for (let k = 0; k < 2; k += 1) builder.moveBall(1, 0);
    expect(builder.ballCounts()).toEqual([2, 10, 8]);
    expect(builder.binMidpoints()).toEqual([-1, 0, 1]);

    await wizard.submitAllocation(builder.toAllocation());
    const doc = await wizard.submitNullShare(2 / 3);
    // responders average 0.3; (1 - 2/3) * 0.3 = 0.1
    expect(doc.ate_post).toBeCloseTo(0.1, 12);
    await wizard.submitReflection('smaller than my first guess');
    expect(wizard.stage).toBe('compared');
    expect(wizard.state?.ate_pre).toBe(0.3);
  });

  it('renders only server-acknowledged numbers (no local recomputation)', async () => {
    await wizard.start();
    await wizard.submitContext(context);
    await wizard.submitAtePre(0.5);
    await wizard.submitExtremes(extreme('largest', 1.0), extreme('smallest', 0.0));
    await wizard.submitAllocation({ type: 'midpoint_split', share_lower: 0.5, share_upper: 0.5 });
    const doc = await wizard.submitNullShare(0.5);
    // byte-for-byte: the wizard's state is exactly the session in the
    // last server response, not a locally recomputed variant
    const serverCopy = server.sessions.get(doc.id)!.doc;
    expect(JSON.stringify(wizard.state)).toBe(JSON.stringify(serverCopy));
    expect(doc.ate_post).toBe(serverCopy.ate_post);
  });

  it('midpoint split at 50/50 on (0, X) with half nulls gives X/4', async () => {
    await wizard.start();
    await wizard.submitContext(context);
    await wizard.submitAtePre(1.0);
    await wizard.submitExtremes(extreme('largest', 2.0), extreme('smallest', 0.0));
    await wizard.submitAllocation({ type: 'midpoint_split', share_lower: 0.5, share_upper: 0.5 });
    const doc = await wizard.submitNullShare(0.5);
    expect(doc.ate_post).toBeCloseTo(0.5, 12); // X=2 → X/4 = 0.5
  });

  it('re-syncs from the server after a stage conflict', async () => {
    await wizard.start();
    await wizard.submitContext(context);
    // second tab advances the same session behind our back
    const other = new WizardController(new ApiClient(''));
    await other.resume(wizard.sessionId!);
    await other.submitAtePre(0.7);

    await expect(wizard.submitAtePre(0.2)).rejects.toThrow(/stage/);
    // after the rejection the wizard shows the server's real state
    expect(wizard.stage).toBe('extremes');
    expect(wizard.state?.ate_pre).toBe(0.7);
    expect(wizard.lastError?.retryable).toBe(true);
  });

  it('keeps validation errors with the expected stage for inline display', async () => {
    await wizard.start();
    await wizard.submitContext(context);
    await expect(
      wizard.submitAllocation({ type: 'midpoint_split', share_lower: 0.5, share_upper: 0.5 }),
    ).rejects.toThrow();
    expect(wizard.lastError?.expectedStage).toBe('ate_pre');
  });

  it('resume restores identical state after a reload', async () => {
    await wizard.start();
    await wizard.submitContext(context);
    await wizard.submitAtePre(0.4);
    const id = wizard.sessionId!;
    const before = JSON.stringify(wizard.state);

    const fresh = new WizardController(new ApiClient(''));
    await fresh.resume(id);
    expect(JSON.stringify(fresh.state)).toBe(before);
    expect(fresh.currentRevision).toBe(wizard.currentRevision);
  });
});
