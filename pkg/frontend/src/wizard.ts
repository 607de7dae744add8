import { ApiClient, ApiError } from './api';
import type {
  AllocationDoc,
  ExtremeJudgment,
  SessionDoc,
  SessionPayload,
  Stage,
  StudyContext,
} from './types';

export interface WizardError {
  code: string;
  message: string;
  expectedStage?: Stage;
  retryable: boolean;
}

/**
 * Drives one elicitation session through the protocol stages.
 *
 * Every step awaits the server's acknowledgement before the local state
 * changes — no optimistic updates, because a 409 means someone else (or
 * another tab) advanced the session and we must re-sync first.
 */
export class WizardController {
  private session: SessionDoc | null = null;
  private revision = 0;
  lastError: WizardError | null = null;

  constructor(private api: ApiClient) {}

  get stage(): Stage {
    return this.session ? this.session.stage : 'context';
  }

  get sessionId(): string | null {
    return this.session ? this.session.id : null;
  }

  get state(): SessionDoc | null {
    return this.session;
  }

  get currentRevision(): number {
    return this.revision;
  }

  private accept(payload: SessionPayload): SessionDoc {
    this.session = payload.session;
    this.revision = payload.revision;
    this.lastError = null;
    return this.session;
  }

  private async step(fn: () => Promise<SessionPayload>): Promise<SessionDoc> {
    try {
      return this.accept(await fn());
    } catch (err) {
      if (err instanceof ApiError) {
        this.lastError = {
          code: err.code,
          message: err.message,
          expectedStage: err.expectedStage,
          retryable: err.retryable ?? false,
        };
        if (err.status === 409 && this.session) {
          // stale view: pull the server's copy so the UI shows the real stage
          this.accept(await this.api.getSession(this.session.id));
          this.lastError = {
            code: err.code,
            message: err.message,
            expectedStage: err.expectedStage,
            retryable: true,
          };
        }
      }
      throw err;
    }
  }

  async start(): Promise<SessionDoc> {
    return this.step(() => this.api.createSession());
  }

  /** Reattach to an existing session (page reload). */
  async resume(sessionId: string): Promise<SessionDoc> {
    return this.step(() => this.api.getSession(sessionId));
  }

  private requireSession(): SessionDoc {
    if (!this.session) throw new Error('wizard not started');
    return this.session;
  }

  async submitContext(context: StudyContext): Promise<SessionDoc> {
    const s = this.requireSession();
    return this.step(() => this.api.advanceContext(s.id, context, this.revision));
  }

  async submitAtePre(atePre: number): Promise<SessionDoc> {
    const s = this.requireSession();
    return this.step(() => this.api.advanceAtePre(s.id, atePre, this.revision));
  }

  async submitExtremes(
    largest: ExtremeJudgment,
    smallest: ExtremeJudgment,
  ): Promise<SessionDoc> {
    const s = this.requireSession();
    return this.step(() => this.api.advanceExtremes(s.id, largest, smallest, this.revision));
  }

  async submitAllocation(allocation: AllocationDoc): Promise<SessionDoc> {
    const s = this.requireSession();
    return this.step(() => this.api.advanceAllocation(s.id, allocation, this.revision));
  }

  async submitNullShare(pNull: number): Promise<SessionDoc> {
    const s = this.requireSession();
    return this.step(() => this.api.advanceNullShare(s.id, pNull, this.revision));
  }

  async submitReflection(reflection: string): Promise<SessionDoc> {
    const s = this.requireSession();
    return this.step(() => this.api.advanceReflection(s.id, reflection, this.revision));
  }
}
